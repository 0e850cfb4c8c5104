#include <scenet/kernels.hpp>
#include <scenet/learning.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace scenet {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::converged: return "converged";
    case Classification::oscillating: return "oscillating";
    case Classification::diverged: return "diverged";
    case Classification::max_iter: return "max-iter";
  }
  return "unknown";
}

LearningStep learn_step(const GameSpec& spec, const Vector& conjectures) {
  const int n = spec.size();
  if (conjectures.size() != n) throw UsageError("learn_step: conjecture length mismatch");
  LearningStep s;
  s.actions = best_replies(spec, conjectures);
  const Vector x = aggregates(spec.net, s.actions);
  s.payoffs.resize(n);
  s.next_conjectures.resize(n);
  for (int i = 0; i < n; ++i) {
    const double a = s.actions(i);
    s.payoffs(i) = utility(spec.alpha(i), a, x(i));
    double next = a > 0.0 ? state_from_message(spec.alpha(i), a, s.payoffs(i)) : conjectures(i);
    const double lo = spec.x_lo(i), hi = spec.x_hi(i);
    if (next < lo || next > hi) {
      // Inversion roundoff at the edge of X is not a clamp event.
      const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
      if (next < lo - slack || next > hi + slack) s.clamped |= AgentMask{1} << i;
      next = std::clamp(next, lo, hi);
    }
    s.next_conjectures(i) = next;
  }
  return s;
}

namespace {

double sup_diff(const Vector& a, const Vector& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

double sup_norm(const Vector& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

AgentMask zero_set(const Vector& actions) {
  AgentMask m = 0;
  for (Eigen::Index i = 0; i < actions.size(); ++i) {
    if (actions(i) == 0.0) m |= AgentMask{1} << i;
  }
  return m;
}

// Looks for a repeating pattern in the recent conjecture history.
class CycleDetector {
 public:
  struct Candidate {
    enum class Kind { none, cycle, drift, steady_drift } kind = Kind::none;
    int period = 0;
    bool operator==(const Candidate&) const = default;
  };

  explicit CycleDetector(const LearningOptions& opts) : opts_(opts) {}

  void push(const Vector& state) {
    states_.push_back(state);
    if (static_cast<int>(states_.size()) > opts_.history + 2) states_.pop_front();
  }

  /// Returns a candidate confirmed over `window` consecutive pushes.
  std::optional<Candidate> confirmed() {
    const Candidate c = detect();
    if (c.kind == Candidate::Kind::none || !(c == last_)) {
      streak_ = c.kind == Candidate::Kind::none ? 0 : 1;
    } else {
      ++streak_;
    }
    last_ = c;
    if (c.kind != Candidate::Kind::none && streak_ >= opts_.window) return c;
    return std::nullopt;
  }

  /// Agents taking part in the confirmed pattern.
  AgentMask agents(const Candidate& c) const {
    const int n = static_cast<int>(states_.back().size());
    const int last = static_cast<int>(states_.size()) - 1;
    const double tol = threshold();
    AgentMask m = 0;
    for (int i = 0; i < n; ++i) {
      double lo = INFINITY, hi = -INFINITY;
      for (int k = 0; k < c.period; ++k) {
        const double v = c.kind == Candidate::Kind::cycle
                             ? states_[last - k](i)
                             : states_[last - k](i) - states_[last - k - 1](i);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > tol) m |= AgentMask{1} << i;
    }
    return m;
  }

 private:
  double threshold() const { return opts_.recurrence_tol * std::max(1.0, sup_norm(states_.back())); }

  Candidate detect() const {
    const int last = static_cast<int>(states_.size()) - 1;
    if (last < 2) return {};
    const double tol = threshold();
    const Vector& now = states_[last];

    for (int p = 2; p <= std::min(opts_.history, last); ++p) {
      const double gap = sup_diff(now, states_[last - p]);
      if (gap > tol) continue;
      double spread = 0.0;
      for (int k = 1; k < p; ++k) spread = std::max(spread, sup_diff(now, states_[last - k]));
      // A slowly contracting spiral also comes back close; a true cycle returns to roundoff.
      if (spread > tol && gap <= kRelative * spread) return {Candidate::Kind::cycle, p};
      return {};
    }

    const Vector step = now - states_[last - 1];
    if (sup_norm(step) <= opts_.motion_floor) return {};
    for (int p = 1; p <= std::min(opts_.history, last - 1); ++p) {
      const Vector earlier = states_[last - p] - states_[last - p - 1];
      const double gap = sup_diff(step, earlier);
      if (gap <= tol && gap <= kRelative * sup_norm(step)) {
        return {p == 1 ? Candidate::Kind::steady_drift : Candidate::Kind::drift, p};
      }
    }
    return {};
  }

  static constexpr double kRelative = 1e-6;

  const LearningOptions& opts_;
  std::deque<Vector> states_;
  Candidate last_;
  int streak_ = 0;
};

EquilibriumRecord limit_record(const GameSpec& spec, const Vector& conjectures, const Vector& actions) {
  const int n = spec.size();
  Vector polished = actions;
  AgentMask active = 0;
  for (int i = 0; i < n; ++i) {
    if (actions(i) > tol::kActive) active |= AgentMask{1} << i;
  }
  if (cap_binding_agents(spec, actions) == 0) {
    const auto exact = kernels::solve_active_set(spec.net.z(), spec.alpha, active);
    bool usable = !exact.singular && sup_diff(exact.actions, actions) <= 1e-6;
    for (int i = 0; i < n && usable; ++i) {
      if (contains(active, i)) usable = exact.actions(i) > tol::kActive;
    }
    if (usable) polished = exact.actions;
  }

  EquilibriumRecord rec;
  rec.actions = polished;
  rec.active_set = active;
  rec.declared_inactive = full_set(n) & ~active;
  rec.conjectures = aggregates(spec.net, polished);
  rec.strict_inactivity = true;
  for (int i = 0; i < n; ++i) {
    if (contains(active, i)) continue;
    rec.actions(i) = 0.0;
    rec.conjectures(i) = conjectures(i);
    rec.strict_inactivity = rec.strict_inactivity && spec.alpha(i) + conjectures(i) < 0.0;
  }
  rec.kind = classify_kind(spec, rec.actions);
  return rec;
}

}  // namespace

Trajectory run_learning(const GameSpec& spec, const Vector& initial, const LearningOptions& opts) {
  const int n = spec.size();
  if (initial.size() != n) throw UsageError("run_learning: initial conjecture length mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(initial(i) >= spec.x_lo(i) && initial(i) <= spec.x_hi(i))) {
      throw UsageError("initial_conjectures[" + std::to_string(i) + "] outside X_i");
    }
  }
  if (opts.window < 1 || opts.max_iter < 1 || opts.history < 2) {
    throw UsageError("run_learning: window, max_iter and history must be positive");
  }

  Trajectory traj;
  CycleDetector cycles(opts);
  Vector x = initial;
  Vector prev_actions;
  AgentMask prev_inactive = 0;
  int calm = 0;
  cycles.push(x);

  for (long t = 0; t < opts.max_iter; ++t) {
    LearningStep s = learn_step(spec, x);
    traj.iterations = t + 1;
    if (opts.record_steps) traj.steps.push_back({x, s.actions, s.payoffs});

    const AgentMask inactive = zero_set(s.actions);
    if (t > 0 && (prev_inactive & ~inactive) != 0) traj.monotone_dropout = false;
    prev_inactive = inactive;

    for (int i = 0; s.clamped != 0 && i < n; ++i) {
      if (!contains(s.clamped, i)) continue;
      if (opts.strict_clamp) {
        throw NumericError("conjecture of agent " + std::to_string(i + 1) + " clamped into X at step " +
                           std::to_string(t));
      }
      traj.clamps.push_back({t, i, s.actions(i) > 0.0
                                       ? state_from_message(spec.alpha(i), s.actions(i), s.payoffs(i))
                                       : x(i),
                             s.next_conjectures(i)});
    }

    traj.final_actions = s.actions;
    if (!s.next_conjectures.allFinite() || sup_norm(s.actions) > opts.divergence_cap ||
        sup_norm(s.next_conjectures) > opts.divergence_cap) {
      traj.final_conjectures = s.next_conjectures;
      traj.classification = Classification::diverged;
      return traj;
    }

    const double dx = sup_diff(s.next_conjectures, x);
    const double da = t > 0 ? sup_diff(s.actions, prev_actions) : 0.0;
    calm = (dx < opts.tol && da < opts.tol) ? calm + 1 : 0;
    prev_actions = s.actions;
    x = s.next_conjectures;
    traj.final_conjectures = x;

    if (calm >= opts.window) {
      traj.classification = Classification::converged;
      traj.final_actions = best_replies(spec, x);
      traj.limit = limit_record(spec, x, traj.final_actions);
      traj.limit_check = is_sce(spec, traj.limit->actions, traj.limit->conjectures);
      return traj;
    }

    cycles.push(x);
    if (auto c = cycles.confirmed()) {
      using Kind = CycleDetector::Candidate::Kind;
      if (c->kind == Kind::steady_drift) {
        traj.classification = Classification::diverged;
      } else {
        traj.classification = Classification::oscillating;
        traj.oscillation = Oscillation{c->period, c->kind == Kind::drift, cycles.agents(*c)};
      }
      return traj;
    }
  }
  traj.classification = Classification::max_iter;
  return traj;
}

AnalyticStability analytic_stability(const GameSpec& spec, const EquilibriumRecord& record) {
  AnalyticStability r;
  r.active = record.active_set;
  const WeightedNetwork block = submatrix(spec.net, record.active_set);
  r.rho = spectral_radius(block.z(), "Z restricted to the active set");
  // Eigenvalues on the unit circle come back as 1 - O(eps).
  r.rho_below_one = r.rho < 1.0 - 1e-9;
  r.witness_strict = true;
  r.record_witness_strict = true;
  for (int i = 0; i < spec.size(); ++i) {
    if (contains(record.active_set, i)) continue;
    r.witness_strict = r.witness_strict && spec.alpha(i) + spec.x_lo(i) < 0.0;
    r.record_witness_strict = r.record_witness_strict && spec.alpha(i) + record.conjectures(i) < 0.0;
  }
  r.stable = r.rho_below_one && r.witness_strict;
  return r;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  // splitmix64 finalizer over seed + golden-ratio stride.
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EmpiricalStability probe_stability(const GameSpec& spec, const EquilibriumRecord& record,
                                   const ProbeOptions& opts) {
  if (!is_sce(spec, record.actions, record.conjectures)) {
    throw UsageError("probe_stability: record is not a selfconfirming equilibrium");
  }
  if (opts.samples < 0 || !(opts.epsilon > 0.0)) {
    throw UsageError("probe_stability: samples must be >= 0 and epsilon > 0");
  }
  const int n = spec.size();
  LearningOptions lopts = opts.learning;
  lopts.record_steps = false;

  struct Outcome {
    bool converged = false;
    bool action_return = false;
    bool conjecture_return = false;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(opts.samples));

  kernels::for_each_index(outcomes.size(), opts.exec, [&](std::size_t k) {
    std::mt19937_64 rng(mix_seed(opts.seed, k));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector dir(n);
    for (int i = 0; i < n; ++i) dir(i) = normal(rng);
    const double norm = dir.norm();
    const double radius = opts.epsilon * std::pow(unit(rng), 1.0 / std::max(n, 1));
    Vector start = record.conjectures;
    if (norm > 0.0) start += dir * (radius / norm);
    start = start.cwiseMax(spec.x_lo).cwiseMin(spec.x_hi);

    const Trajectory tr = run_learning(spec, start, lopts);
    Outcome& o = outcomes[k];
    o.converged = tr.classification == Classification::converged;
    if (o.converged) {
      o.action_return = sup_diff(tr.limit->actions, record.actions) <= opts.return_tol;
      o.conjecture_return = sup_diff(tr.final_conjectures, record.conjectures) <= opts.return_tol;
    }
  });

  EmpiricalStability e;
  e.epsilon = opts.epsilon;
  e.samples = opts.samples;
  e.seed = opts.seed;
  for (const auto& o : outcomes) {
    e.converged += o.converged;
    e.action_returns += o.action_return;
    e.conjecture_returns += o.conjecture_return;
  }
  return e;
}

StableFamily stable_sce_family(const GameSpec& spec, const EquilibriumRecord& record, Execution exec) {
  StableFamily fam;
  const int n = spec.size();
  fam.conditions = interior_conditions(submatrix(spec.net, record.active_set));
  fam.applicable = fam.conditions.any_sufficient();
  if (!fam.applicable) return fam;

  const AgentMask i0 = justifiable_inactivity_set(spec);
  std::vector<AgentMask> candidates;
  for (AgentMask j = record.active_set;; j = (j - 1) & record.active_set) {
    if (((full_set(n) & ~j) & ~i0) == 0) candidates.push_back(j);
    if (j == 0) break;
  }
  std::sort(candidates.begin(), candidates.end());

  const auto solved = kernels::solve_active_sets(spec.net.z(), spec.alpha, candidates, exec);
  for (const auto& s : solved) {
    if (s.singular) continue;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (contains(s.active, i)) {
        ok = s.actions(i) > tol::kActive && s.actions(i) <= spec.a_max(i) - tol::kCapMargin;
      }
    }
    if (ok) fam.records.push_back(make_record(spec, s.actions, full_set(n) & ~s.active));
  }
  return fam;
}

}  // namespace scenet
