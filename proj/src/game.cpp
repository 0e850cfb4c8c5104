#include <scenet/game.hpp>

#include <algorithm>
#include <cmath>

namespace scenet {

double default_state_bound(const WeightedNetwork& net, const Vector& a_max, const Vector& alpha) {
  const int n = net.size();
  double bound = 0.0;
  for (int i = 0; i < n; ++i) {
    double reach = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = net.bounds() ? std::max(std::abs(net.bounds()->lo), std::abs(net.bounds()->hi))
                                    : 2.0 * std::abs(net(i, j));
      reach += w * a_max(j);
    }
    bound = std::max(bound, reach);
  }
  const double alpha_floor = n > 0 ? 2.0 * alpha.cwiseAbs().maxCoeff() : 0.0;
  return std::max(bound, alpha_floor);
}

GameSpec GameSpec::make(WeightedNetwork net, Vector alpha, std::optional<Vector> a_max,
                        std::optional<Vector> x_lo, std::optional<Vector> x_hi) {
  const int n = net.size();
  GameSpec spec;
  spec.alpha = std::move(alpha);
  spec.a_max = a_max.value_or(Vector::Constant(n, kDefaultActionCap));
  if (spec.alpha.size() != n) throw UsageError("alpha must have one entry per agent");
  if (spec.a_max.size() != n) throw UsageError("a_max must have one entry per agent");
  const double b = default_state_bound(net, spec.a_max, spec.alpha);
  spec.x_lo = x_lo.value_or(Vector::Constant(n, -b));
  spec.x_hi = x_hi.value_or(Vector::Constant(n, b));
  spec.net = std::move(net);
  spec.validate();
  return spec;
}

void GameSpec::validate() const {
  const int n = size();
  if (alpha.size() != n || a_max.size() != n || x_lo.size() != n || x_hi.size() != n) {
    throw UsageError("game: per-agent arrays must have length n = " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    const std::string who = "agent " + std::to_string(i + 1);
    if (!(a_max(i) > 0.0)) throw UsageError(who + ": a_max must be > 0");
    if (!(x_lo(i) <= x_hi(i))) throw UsageError(who + ": x_lo > x_hi");
    double neg = 0.0, pos = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = net(i, j);
      (w < 0.0 ? neg : pos) += w * a_max(j);
    }
    if (x_lo(i) > neg) throw UsageError(who + ": x_lo does not contain the lowest reachable state");
    if (x_hi(i) < pos) throw UsageError(who + ": x_hi does not contain the highest reachable state");
  }
}

double aggregate(const WeightedNetwork& net, const Vector& actions, int i) {
  return net.z().row(i).dot(actions);
}

Vector aggregates(const WeightedNetwork& net, const Vector& actions) { return net.z() * actions; }

double best_reply(double alpha, double a_max, double x_hat) {
  if (x_hat <= -alpha) return 0.0;
  if (x_hat < a_max - alpha) return alpha + x_hat;
  return a_max;
}

Vector best_replies(const GameSpec& spec, const Vector& x_hat) {
  Vector a(spec.size());
  for (int i = 0; i < spec.size(); ++i) a(i) = best_reply(spec.alpha(i), spec.a_max(i), x_hat(i));
  return a;
}

double utility(double alpha, double action, double state) {
  return alpha * action - 0.5 * action * action + action * state;
}

double payoff(const GameSpec& spec, const Vector& actions, int i) {
  return utility(spec.alpha(i), actions(i), aggregate(spec.net, actions, i));
}

double feedback_message(const GameSpec& spec, const Vector& actions, int i) {
  return payoff(spec, actions, i);
}

double state_from_message(double alpha, double action, double message) {
  return message / action - alpha + 0.5 * action;
}

InfoSet expost_info_set(const GameSpec& spec, int i, double action, double state) {
  if (action < 0.0 || action > spec.a_max(i)) throw UsageError("action outside [0, a_max]");
  if (action == 0.0) return {spec.x_lo(i), spec.x_hi(i)};
  return {state, state};
}

AgentMask justifiable_inactivity_set(const GameSpec& spec) {
  AgentMask set = 0;
  for (int i = 0; i < spec.size(); ++i) {
    if (spec.x_lo(i) <= -spec.alpha(i)) set |= AgentMask{1} << i;
  }
  return set;
}

AgentMask cap_binding_agents(const GameSpec& spec, const Vector& actions, double margin) {
  AgentMask set = 0;
  for (int i = 0; i < spec.size(); ++i) {
    if (actions(i) >= spec.a_max(i) - margin) set |= AgentMask{1} << i;
  }
  return set;
}

}  // namespace scenet
