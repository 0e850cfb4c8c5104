#ifndef SCENET_EQUILIBRIUM_HPP
#define SCENET_EQUILIBRIUM_HPP

#include <scenet/game.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace scenet {

enum class EquilibriumKind { ne, sce_not_ne };

std::string_view to_string(EquilibriumKind kind);

/// An action profile with witnessing conjectures. Two records are the same
/// equilibrium iff their action profiles agree; declared_inactive is metadata.
struct EquilibriumRecord {
  Vector actions;
  Vector conjectures;
  AgentMask active_set = 0;
  AgentMask declared_inactive = 0;
  EquilibriumKind kind = EquilibriumKind::sce_not_ne;
  /// Every inactive agent has alpha_i + xhat_i < 0 for the witness.
  bool strict_inactivity = false;
};

/// A candidate active set whose system (I - Z_K) is singular.
struct Degeneracy {
  AgentMask active = 0;
  /// The singular system is consistent, i.e. a continuum of solutions exists.
  bool consistent = false;
};

struct EquilibriumSet {
  std::vector<EquilibriumRecord> records;
  std::vector<Degeneracy> degenerate;
  /// Candidates rejected only because some action reached the cap.
  std::vector<AgentMask> cap_rejected;

  std::size_t count_kind(EquilibriumKind kind) const;
};

/// NE iff every inactive agent has alpha_i + x_i <= tol::kBoundary.
EquilibriumKind classify_kind(const GameSpec& spec, const Vector& actions);

/// Builds a record with the canonical witness: the true aggregate for
/// active agents and x_lo for inactive ones.
EquilibriumRecord make_record(const GameSpec& spec, const Vector& actions, AgentMask declared_inactive);

/// All Nash equilibria of the game restricted to `players`, everyone else
/// clamped to zero. Exhaustive over candidate active sets K of `players`.
EquilibriumSet solve_auxiliary_ne(const GameSpec& spec, AgentMask players,
                                  Execution exec = Execution::parallel);

EquilibriumSet solve_full_ne(const GameSpec& spec, Execution exec = Execution::parallel);

/// Selfconfirming action profiles: for each J whose complement is within
/// I_0, the fully active equilibrium of the game on J extended by zeros.
/// Records are sorted by active-set bitmask.
EquilibriumSet enumerate_sce(const GameSpec& spec, Execution exec = Execution::parallel);

struct ConditionResult {
  bool holds = false;
  std::string witness;
};

/// Sufficient conditions for an interior solution of (I - Z) a = 1, and the
/// direct check of the conclusion.
struct InteriorReport {
  ConditionResult bounded;
  ConditionResult negative_limited;
  ConditionResult symmetrizable_limited;
  bool degenerate = false;
  /// (I - Z)^{-1} 1 when not degenerate.
  Vector solution;
  bool positive = false;

  bool any_sufficient() const {
    return bounded.holds || negative_limited.holds || symmetrizable_limited.holds;
  }
};

InteriorReport interior_conditions(const WeightedNetwork& net);

struct SceViolation {
  enum class Condition { domain, rationality, confirmation };
  int agent = 0;
  Condition condition = Condition::domain;
  std::string detail;
};

struct SceCheck {
  bool ok = true;
  std::vector<SceViolation> violations;

  explicit operator bool() const noexcept { return ok; }
  std::string describe() const;
};

/// Subjective rationality plus confirmed conjectures (feedback equality).
SceCheck is_sce(const GameSpec& spec, const Vector& actions, const Vector& conjectures);

/// Sum of payoffs including the global term beta * sum_{j != i} a_j.
double welfare(const GameSpec& spec, double beta, const Vector& actions);

struct SocialOptimum {
  Vector actions;
  bool degenerate = false;
  bool negative_components = false;
  bool above_cap = false;
  /// I - (Z + Z^T) is positive definite, so the stationary point is the maximum.
  bool is_maximum = false;
};

/// Stationary point of welfare: a_i = alpha_i + (n-1) beta + sum_j (z_ij + z_ji) a_j.
SocialOptimum social_optimum(const GameSpec& spec, double beta);

}  // namespace scenet

#endif  // SCENET_EQUILIBRIUM_HPP
