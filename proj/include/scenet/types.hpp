#ifndef SCENET_TYPES_HPP
#define SCENET_TYPES_HPP

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scenet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Set of agents as a bitmask: bit i is agent i (0-based).
using AgentMask = std::uint64_t;

/// Subset enumeration is 2^n linear solves; beyond this it is not a desk problem.
inline constexpr int kMaxEnumerableAgents = 30;

/// Selects the serial reference loop or the OpenMP kernel.
enum class Execution { serial, parallel };

namespace tol {
/// An action counts as active above this value.
inline constexpr double kActive = 1e-9;
/// Boundary best-reply-zero test: alpha_i + x_i <= kBoundary.
inline constexpr double kBoundary = 1e-9;
/// Conjecture confirmation and fixed-point substitution tolerance.
inline constexpr double kConfirm = 1e-9;
/// Distance from the action cap that counts as binding.
inline constexpr double kCapMargin = 1e-6;
}  // namespace tol

/// Invalid input: bad shapes, out-of-range agents, unknown identifiers.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (non-convergence, breakdown).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool contains(AgentMask set, int agent) { return (set >> agent) & 1U; }

inline int set_size(AgentMask set) { return std::popcount(set); }

inline AgentMask full_set(int n) {
  return n >= 64 ? ~AgentMask{0} : (AgentMask{1} << n) - 1;
}

std::vector<int> agents_of(AgentMask set, int n);
AgentMask mask_of(std::span<const int> agents);

/// 1-based brace rendering, e.g. "{1,2,4}".
std::string format_agent_set(AgentMask set, int n);

}  // namespace scenet

#endif  // SCENET_TYPES_HPP
