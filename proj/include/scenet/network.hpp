#ifndef SCENET_NETWORK_HPP
#define SCENET_NETWORK_HPP

#include <scenet/types.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scenet {

/// Commonly known interval [lo, hi] containing every off-diagonal weight.
struct WeightBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/**
 * Externality matrix Z of a network game: z(i, j) is the weight with which
 * agent j's action enters agent i's payoff state. The diagonal is zero.
 *
 * Labels carry the original agent indices when the network is a restriction
 * of a larger one (see submatrix()).
 */
class WeightedNetwork {
 public:
  WeightedNetwork() = default;
  explicit WeightedNetwork(Matrix z, std::optional<WeightBounds> bounds = std::nullopt,
                           std::vector<int> labels = {}, std::string name = {});

  int size() const noexcept { return static_cast<int>(z_.rows()); }
  const Matrix& z() const noexcept { return z_; }
  double operator()(int i, int j) const { return z_(i, j); }
  const std::optional<WeightBounds>& bounds() const noexcept { return bounds_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::string& name() const noexcept { return name_; }

 private:
  Matrix z_ = Matrix(0, 0);
  std::optional<WeightBounds> bounds_;
  std::vector<int> labels_;
  std::string name_;
};

struct NeighborSets {
  std::vector<int> all;       // z_ij != 0
  std::vector<int> positive;  // z_ij > 0
  std::vector<int> negative;  // z_ij < 0
};

NeighborSets neighbor_sets(const WeightedNetwork& net, int i);

/// Restriction to the rows and columns in `subset`; labels are preserved.
WeightedNetwork submatrix(const WeightedNetwork& net, AgentMask subset);
WeightedNetwork submatrix(const WeightedNetwork& net, std::span<const int> subset);

/// Largest eigenvalue modulus, to 1e-9. The empty matrix has radius 0.
double spectral_radius(const Matrix& z, std::string_view name = {});
double spectral_radius(const WeightedNetwork& net);

/// Largest (real) eigenvalue of a symmetric matrix.
double largest_eigenvalue_symmetric(const Matrix& s);

enum class DecompositionKind { uniform, diagonal, signed_uniform, general };

std::string_view to_string(DecompositionKind kind);

/// Z = diag(gamma) * z0.
struct Decomposition {
  DecompositionKind kind = DecompositionKind::general;
  Vector gamma;
  Matrix z0;

  Matrix recompose() const;
  /// The symmetric similar matrix with entries z0_ij * sqrt(gamma_i gamma_j).
  Matrix symmetrized() const;
};

/// Why no positive-diagonal symmetrization exists.
struct Obstruction {
  enum class Kind { sign_mismatch, inconsistent_cycle };
  Kind kind = Kind::sign_mismatch;
  int i = 0;
  int j = 0;
  /// For an inconsistent cycle: the agents on the cycle closed by edge (i, j).
  std::vector<int> cycle;
  double implied_ratio = 0.0;  // gamma_j / gamma_i from the labeling
  double edge_ratio = 0.0;     // z_ji / z_ij on the closing edge

  std::string describe() const;
};

struct DecomposeResult {
  std::optional<Decomposition> decomposition;
  std::optional<Obstruction> obstruction;

  explicit operator bool() const noexcept { return decomposition.has_value(); }
};

/// Finds Z = Gamma Z0 with Gamma positive diagonal and Z0 symmetric, or the
/// obstruction. gamma is normalized to 1 at the lowest agent of every
/// connected component of the undirected support.
DecomposeResult symmetrize_decompose(const WeightedNetwork& net);

/// Most specific of gamma*Z0, Gamma*Z0 (0/1 rows), S (.) Z0, or general.
Decomposition classify_structure(const WeightedNetwork& net);

enum class Assumption { bounded, same_sign, negative, limited, symmetrizable, symmetrizable_limited };

inline constexpr Assumption kAllAssumptions[] = {
    Assumption::bounded,  Assumption::same_sign,     Assumption::negative,
    Assumption::limited,  Assumption::symmetrizable, Assumption::symmetrizable_limited};

std::string_view to_string(Assumption which);
/// Throws UsageError on an unknown id.
Assumption parse_assumption(std::string_view id);

struct AssumptionReport {
  Assumption which = Assumption::bounded;
  bool holds = false;
  std::optional<std::pair<int, int>> violating_pair;
  /// Spectral radius for `limited`; lambda_max of the symmetrized matrix for
  /// `symmetrizable-limited`.
  std::optional<double> value;
  std::optional<Decomposition> decomposition;
  std::optional<Obstruction> obstruction;

  /// Witness as text, agents 1-based.
  std::string witness() const;
};

AssumptionReport check_assumption(const WeightedNetwork& net, Assumption which);

struct RandomNetSpec {
  int n = 0;
  double k = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
  std::uint64_t seed = 0;
};

/// Z = Gamma Z0: Z0 an undirected Erdos-Renyi draw with link probability
/// k/(n-1), gamma_i log-normal with mean mu and variance sigma2.
WeightedNetwork random_symmetrizable(const RandomNetSpec& spec);

}  // namespace scenet

#endif  // SCENET_NETWORK_HPP
