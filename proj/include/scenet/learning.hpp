#ifndef SCENET_LEARNING_HPP
#define SCENET_LEARNING_HPP

#include <scenet/equilibrium.hpp>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace scenet {

struct LearningOptions {
  double tol = 1e-10;
  int window = 3;
  long max_iter = 100000;
  double divergence_cap = 1e9;
  /// Ring of past states searched for recurrences.
  int history = 64;
  double recurrence_tol = 1e-9;
  /// Increments below this are treated as no motion by the cycle detector.
  double motion_floor = 1e-6;
  /// Any clamp of a conjecture into X_i aborts the run with NumericError.
  bool strict_clamp = false;
  bool record_steps = true;
};

struct LearningStep {
  Vector actions;
  Vector payoffs;
  Vector next_conjectures;
  /// Agents whose next conjecture was clamped into X_i.
  AgentMask clamped = 0;
};

/// One synchronous round: best replies, realized payoffs, and updated
/// conjectures (frozen when inactive, payoff inversion when active).
LearningStep learn_step(const GameSpec& spec, const Vector& conjectures);

enum class Classification { converged, oscillating, diverged, max_iter };

std::string_view to_string(Classification c);

struct TrajectoryPoint {
  Vector conjectures;
  Vector actions;
  Vector payoffs;
};

struct ClampEvent {
  long t = 0;
  int agent = 0;
  double raw = 0.0;
  double clamped = 0.0;
};

struct Oscillation {
  int period = 0;
  /// The pattern repeats in increments while the state keeps moving.
  bool drifting = false;
  /// Agents whose conjectures (or increments, when drifting) vary over the cycle.
  AgentMask agents = 0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> steps;
  Classification classification = Classification::max_iter;
  std::optional<Oscillation> oscillation;
  std::optional<EquilibriumRecord> limit;
  /// is_sce on the limit record; only set when converged.
  std::optional<SceCheck> limit_check;
  std::vector<ClampEvent> clamps;
  bool monotone_dropout = true;
  long iterations = 0;
  Vector final_conjectures;
  Vector final_actions;
};

/// Iterates learn_step from `initial` until convergence, a recurrence,
/// divergence, or max_iter. Throws UsageError if `initial` is outside X.
Trajectory run_learning(const GameSpec& spec, const Vector& initial, const LearningOptions& opts = {});

struct AnalyticStability {
  bool stable = false;
  double rho = 0.0;
  bool rho_below_one = false;
  /// alpha_i + x_lo_i < 0 for every inactive agent.
  bool witness_strict = false;
  /// alpha_i + xhat_i < 0 for the record's own conjectures.
  bool record_witness_strict = false;
  AgentMask active = 0;
};

/// Sufficient condition: rho(Z_active) < 1 and strict inactivity at x_lo.
AnalyticStability analytic_stability(const GameSpec& spec, const EquilibriumRecord& record);

struct ProbeOptions {
  double epsilon = 1e-3;
  int samples = 100;
  std::uint64_t seed = 0;
  double return_tol = 1e-6;
  LearningOptions learning;
  Execution exec = Execution::parallel;
};

struct EmpiricalStability {
  double epsilon = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  int converged = 0;
  /// Limit actions within return_tol of the record's actions.
  int action_returns = 0;
  /// Limit conjectures within return_tol of the record's conjectures.
  int conjecture_returns = 0;

  double action_fraction() const { return samples ? double(action_returns) / samples : 0.0; }
  double conjecture_fraction() const { return samples ? double(conjecture_returns) / samples : 0.0; }
};

/// Uniform perturbations in the Euclidean epsilon-ball around the record's
/// conjectures, clamped to X. Deterministic given the seed for either execution.
EmpiricalStability probe_stability(const GameSpec& spec, const EquilibriumRecord& record,
                                   const ProbeOptions& opts = {});

struct StabilityReport {
  AnalyticStability analytic;
  std::optional<EmpiricalStability> empirical;
};

struct StableFamily {
  bool applicable = false;
  InteriorReport conditions;
  /// Auxiliary equilibria on every J within the record's active set.
  std::vector<EquilibriumRecord> records;
};

StableFamily stable_sce_family(const GameSpec& spec, const EquilibriumRecord& record,
                               Execution exec = Execution::parallel);

/// Counter-based seed derivation used for per-probe streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter);

}  // namespace scenet

#endif  // SCENET_LEARNING_HPP
