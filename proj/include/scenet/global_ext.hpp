#ifndef SCENET_GLOBAL_EXT_HPP
#define SCENET_GLOBAL_EXT_HPP

#include <scenet/equilibrium.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scenet {

/**
 * Game with an extra global term: v_i = alpha a_i - a_i^2/2 + a_i x_i + y_i,
 * y_i = beta * sum_{j != i} a_j. Each agent holds a fixed perceived
 * centrality c_i = xhat_i / yhat_i.
 */
struct GlobalGameSpec {
  GameSpec base;
  double beta = 0.0;
  Vector c;
  Vector y_lo;
  Vector y_hi;

  int size() const noexcept { return base.size(); }

  /// Y_i defaults to [0, beta * sum_{j != i} a_max_j].
  static GlobalGameSpec make(GameSpec base, double beta, Vector c, std::optional<Vector> y_lo = std::nullopt,
                             std::optional<Vector> y_hi = std::nullopt);

  /// Shapes, beta >= 0, finite c, y_lo <= y_hi.
  void validate() const;
};

/// Conditions under which the fixed-point dynamics are defined: alpha > 0
/// and common, Z >= 0, and 0 < c_i <= (sum_{j != i} z_ij) / beta.
struct Admissibility {
  bool ok = true;
  std::string reason;
};

Admissibility check_admissible(const GlobalGameSpec& g);

double global_term(const GlobalGameSpec& g, const Vector& actions, int i);
Vector global_terms(const GlobalGameSpec& g, const Vector& actions);
double global_payoff(const GlobalGameSpec& g, const Vector& actions, int i);

struct GlobalConjecture {
  Vector x_hat;
  Vector y_hat;
};

/// Inactive: xhat <= -alpha and yhat = y. Active: a = alpha + xhat and
/// yhat = y + a (x - xhat). Tolerance tol::kConfirm.
SceCheck check_global_sce(const GlobalGameSpec& g, const Vector& actions, const GlobalConjecture& conj);

struct Centrality {
  Vector values;
  bool degenerate = false;
};

/// Solves b = alpha + Z b.
Centrality bonacich(const WeightedNetwork& net, const Vector& alpha);
Centrality bonacich(const WeightedNetwork& net, double alpha);

struct TrueCentrality {
  double value = 0.0;
  bool defined = false;
  /// Within [0, sum_{j != i} z_ij / beta].
  bool in_range = false;
};

/// c'_i = x_i / y_i.
TrueCentrality true_centrality(const GlobalGameSpec& g, const Vector& actions, int i);

struct GlobalStep {
  Vector actions;
  Vector next_x_hat;
  /// yhat implied by the realized payoff and the fixed ratio c.
  Vector next_y_hat;
};

/// a = alpha + xhat; xhat' = c (a x + y) / (1 + c a).
GlobalStep global_learn_step(const GlobalGameSpec& g, const Vector& x_hat);

/// H_i = alpha + c_i (a_i x_i + y_i) / (1 + c_i a_i) - a_i.
Vector fixed_point_residual(const GlobalGameSpec& g, const Vector& actions);

enum class GlobalMethod { automatic, plain, damped, gauss_seidel };

std::string_view to_string(GlobalMethod m);
GlobalMethod parse_global_method(std::string_view id);

struct GlobalSolveOptions {
  GlobalMethod method = GlobalMethod::automatic;
  double tol = 1e-10;
  long max_iter = 100000;
  double damping = 0.5;
};

struct GlobalSolution {
  bool converged = false;
  Vector actions;
  GlobalConjecture conjectures;
  /// max_i |H_i| at `actions`, by direct substitution.
  double residual = 0.0;
  long iterations = 0;
  GlobalMethod method = GlobalMethod::plain;
};

/// Fixed point of the global learning map. Automatic picks plain iteration
/// when check_homeo2 holds, else damped, falling back to per-agent
/// Gauss-Seidel on the exact quadratic. On failure the best iterate is returned
/// with converged = false. Throws UsageError if the inputs are not admissible.
GlobalSolution solve_global_sce(const GlobalGameSpec& g, const GlobalSolveOptions& opts = {});

/// Positive root of c a^2 + (1 - alpha c - c x) a - (alpha + c y) = 0.
double parabola_root(double alpha, double c, double x, double y);

struct Homeo2Check {
  std::vector<bool> per_agent;
  bool all = false;
};

/// 0 < c_i beta (n - 1) < sum_{j != i} z_ij < 2 for each agent.
Homeo2Check check_homeo2(const GlobalGameSpec& g);

struct PhiPoint {
  Vector c;
  std::optional<GlobalSolution> solution;
  std::string error;
};

/// Solves at each c in `grid` (same network, alpha, beta).
std::vector<PhiPoint> phi_map(const GlobalGameSpec& g, const std::vector<Vector>& grid,
                              const GlobalSolveOptions& opts = {}, Execution exec = Execution::parallel);

/// Cartesian grid with `steps` points per agent on (0, sum_{j != i} z_ij / beta].
std::vector<Vector> admissible_grid(const GlobalGameSpec& g, int steps);

}  // namespace scenet

#endif  // SCENET_GLOBAL_EXT_HPP
