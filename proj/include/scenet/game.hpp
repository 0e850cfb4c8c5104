#ifndef SCENET_GAME_HPP
#define SCENET_GAME_HPP

#include <scenet/network.hpp>

#include <optional>

namespace scenet {

/// "Sufficiently large" default action cap.
inline constexpr double kDefaultActionCap = 1e6;

/**
 * Linear-quadratic network game: v_i(a_i, x_i) = alpha_i a_i - a_i^2/2 + a_i x_i
 * with actions in [0, a_max_i] and payoff states in X_i = [x_lo_i, x_hi_i].
 */
struct GameSpec {
  WeightedNetwork net;
  Vector alpha;
  Vector a_max;
  Vector x_lo;
  Vector x_hi;

  int size() const noexcept { return net.size(); }

  /// Fills a_max with kDefaultActionCap and X_i with [-B, B] from
  /// default_state_bound() where not given, then validates.
  static GameSpec make(WeightedNetwork net, Vector alpha, std::optional<Vector> a_max = std::nullopt,
                       std::optional<Vector> x_lo = std::nullopt,
                       std::optional<Vector> x_hi = std::nullopt);

  /// Throws UsageError if shapes mismatch, a caps are not positive, or an
  /// interval X_i does not contain the range of the aggregator.
  void validate() const;
};

/// Half-width B of the default symmetric state interval. Large enough to
/// contain every reachable aggregate and to make inactivity justifiable for
/// every agent (B >= 2 max|alpha_i|).
double default_state_bound(const WeightedNetwork& net, const Vector& a_max, const Vector& alpha);

/// x_i = sum_{j != i} z_ij a_j.
double aggregate(const WeightedNetwork& net, const Vector& actions, int i);
Vector aggregates(const WeightedNetwork& net, const Vector& actions);

/// Proximate best reply r_i(x): 0, alpha + x, or the cap.
double best_reply(double alpha, double a_max, double x_hat);
Vector best_replies(const GameSpec& spec, const Vector& x_hat);

double utility(double alpha, double action, double state);
double payoff(const GameSpec& spec, const Vector& actions, int i);

/// Message under just observable payoffs: the realized payoff.
double feedback_message(const GameSpec& spec, const Vector& actions, int i);

/// Payoff state revealed to an active agent by message m; requires action > 0.
double state_from_message(double alpha, double action, double message);

/// Ex post information set: all of X_i when inactive, {x_i} when active.
struct InfoSet {
  double lo = 0.0;
  double hi = 0.0;

  bool singleton() const noexcept { return lo == hi; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

InfoSet expost_info_set(const GameSpec& spec, int i, double action, double state);

/// I_0 = { i : x_lo_i <= -alpha_i }.
AgentMask justifiable_inactivity_set(const GameSpec& spec);

/// Agents whose action is within `margin` of the cap.
AgentMask cap_binding_agents(const GameSpec& spec, const Vector& actions,
                             double margin = tol::kCapMargin);

}  // namespace scenet

#endif  // SCENET_GAME_HPP
