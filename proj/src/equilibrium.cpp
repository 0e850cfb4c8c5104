#include <scenet/equilibrium.hpp>
#include <scenet/kernels.hpp>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scenet {

std::string_view to_string(EquilibriumKind kind) {
  return kind == EquilibriumKind::ne ? "NE" : "SCE-non-NE";
}

std::size_t EquilibriumSet::count_kind(EquilibriumKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const auto& r) { return r.kind == kind; }));
}

namespace {

void require_enumerable(const GameSpec& spec) {
  if (spec.size() > kMaxEnumerableAgents) {
    throw UsageError("equilibrium enumeration supports at most " +
                     std::to_string(kMaxEnumerableAgents) + " agents");
  }
}

AgentMask active_mask(const Vector& actions) {
  AgentMask m = 0;
  for (Eigen::Index i = 0; i < actions.size(); ++i) {
    if (actions(i) > tol::kActive) m |= AgentMask{1} << i;
  }
  return m;
}

// Submasks of `set` in ascending order.
std::vector<AgentMask> submasks(AgentMask set) {
  std::vector<AgentMask> out;
  AgentMask s = set;
  while (true) {
    out.push_back(s);
    if (s == 0) break;
    s = (s - 1) & set;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool same_profile(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() <= tol::kActive;
}

void push_unique(std::vector<EquilibriumRecord>& records, EquilibriumRecord rec) {
  for (const auto& r : records) {
    if (same_profile(r.actions, rec.actions)) return;
  }
  records.push_back(std::move(rec));
}

}  // namespace

EquilibriumKind classify_kind(const GameSpec& spec, const Vector& actions) {
  const Vector x = aggregates(spec.net, actions);
  for (int i = 0; i < spec.size(); ++i) {
    if (actions(i) <= tol::kActive && spec.alpha(i) + x(i) > tol::kBoundary) {
      return EquilibriumKind::sce_not_ne;
    }
  }
  return EquilibriumKind::ne;
}

EquilibriumRecord make_record(const GameSpec& spec, const Vector& actions, AgentMask declared_inactive) {
  EquilibriumRecord rec;
  rec.actions = actions;
  rec.active_set = active_mask(actions);
  rec.declared_inactive = declared_inactive;
  const Vector x = aggregates(spec.net, actions);
  rec.conjectures = x;
  rec.strict_inactivity = true;
  for (int i = 0; i < spec.size(); ++i) {
    if (contains(rec.active_set, i)) continue;
    rec.actions(i) = 0.0;
    rec.conjectures(i) = spec.x_lo(i);
    rec.strict_inactivity = rec.strict_inactivity && spec.alpha(i) + spec.x_lo(i) < 0.0;
  }
  rec.kind = classify_kind(spec, rec.actions);
  return rec;
}

EquilibriumSet solve_auxiliary_ne(const GameSpec& spec, AgentMask players, Execution exec) {
  require_enumerable(spec);
  const int n = spec.size();
  if ((players & ~full_set(n)) != 0) throw UsageError("auxiliary game: player set out of range");

  const auto candidates = submasks(players);
  const auto solved = kernels::solve_active_sets(spec.net.z(), spec.alpha, candidates, exec);
  const AgentMask declared_inactive = full_set(n) & ~players;

  EquilibriumSet out;
  for (const auto& s : solved) {
    if (s.singular) {
      out.degenerate.push_back({s.active, s.consistent});
      continue;
    }
    bool ok = true;
    bool capped = false;
    for (int i = 0; i < n && ok; ++i) {
      if (!contains(s.active, i)) continue;
      ok = s.actions(i) > tol::kActive;
      capped = capped || s.actions(i) > spec.a_max(i) - tol::kCapMargin;
    }
    if (!ok) continue;
    const Vector x = aggregates(spec.net, s.actions);
    for (int j = 0; j < n && ok; ++j) {
      if (contains(players, j) && !contains(s.active, j)) ok = spec.alpha(j) + x(j) <= tol::kBoundary;
    }
    if (!ok) continue;
    if (capped) {
      out.cap_rejected.push_back(s.active);
      continue;
    }
    push_unique(out.records, make_record(spec, s.actions, declared_inactive));
  }
  return out;
}

EquilibriumSet solve_full_ne(const GameSpec& spec, Execution exec) {
  return solve_auxiliary_ne(spec, full_set(spec.size()), exec);
}

EquilibriumSet enumerate_sce(const GameSpec& spec, Execution exec) {
  require_enumerable(spec);
  const int n = spec.size();
  const AgentMask everyone = full_set(n);
  const AgentMask i0 = justifiable_inactivity_set(spec);
  const AgentMask must_play = everyone & ~i0;

  std::vector<AgentMask> candidates;
  for (AgentMask optional_part : submasks(i0)) candidates.push_back(must_play | optional_part);
  std::sort(candidates.begin(), candidates.end());

  const auto solved = kernels::solve_active_sets(spec.net.z(), spec.alpha, candidates, exec);

  EquilibriumSet out;
  for (const auto& s : solved) {
    if (s.singular) {
      out.degenerate.push_back({s.active, s.consistent});
      continue;
    }
    bool ok = true;
    bool capped = false;
    for (int i = 0; i < n && ok; ++i) {
      if (!contains(s.active, i)) continue;
      ok = s.actions(i) > tol::kActive;
      capped = capped || s.actions(i) > spec.a_max(i) - tol::kCapMargin;
    }
    if (!ok) continue;
    if (capped) {
      out.cap_rejected.push_back(s.active);
      continue;
    }
    push_unique(out.records, make_record(spec, s.actions, everyone & ~s.active));
  }
  return out;
}

InteriorReport interior_conditions(const WeightedNetwork& net) {
  InteriorReport r;
  const auto bounded = check_assumption(net, Assumption::bounded);
  r.bounded = {bounded.holds, bounded.witness()};

  const auto negative = check_assumption(net, Assumption::negative);
  const auto limited = check_assumption(net, Assumption::limited);
  r.negative_limited = {negative.holds && limited.holds,
                        negative.holds ? limited.witness() : "positive entry " + negative.witness()};

  const auto sym = check_assumption(net, Assumption::symmetrizable_limited);
  r.symmetrizable_limited = {sym.holds, sym.witness()};

  const int n = net.size();
  const Matrix system = Matrix::Identity(n, n) - net.z();
  Eigen::FullPivLU<Matrix> lu(system);
  lu.setThreshold(1e-12);
  if (n > 0 && !lu.isInvertible()) {
    r.degenerate = true;
    return r;
  }
  r.solution = n > 0 ? Vector(lu.solve(Vector::Ones(n))) : Vector(0);
  r.positive = (r.solution.array() > 0.0).all();
  return r;
}

std::string SceCheck::describe() const {
  if (ok) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << "agent " << v.agent + 1 << ": " << v.detail << "; ";
  }
  return os.str();
}

SceCheck is_sce(const GameSpec& spec, const Vector& actions, const Vector& conjectures) {
  const int n = spec.size();
  if (actions.size() != n || conjectures.size() != n) throw UsageError("is_sce: length mismatch");
  SceCheck check;
  auto fail = [&](int i, SceViolation::Condition c, std::string detail) {
    check.ok = false;
    check.violations.push_back({i, c, std::move(detail)});
  };
  const Vector x = aggregates(spec.net, actions);
  for (int i = 0; i < n; ++i) {
    const double a = actions(i);
    const double xh = conjectures(i);
    if (a < -tol::kConfirm || a > spec.a_max(i) + tol::kConfirm) {
      fail(i, SceViolation::Condition::domain, "action outside [0, a_max]");
      continue;
    }
    if (xh < spec.x_lo(i) - tol::kConfirm || xh > spec.x_hi(i) + tol::kConfirm) {
      fail(i, SceViolation::Condition::domain, "conjecture outside X_i");
      continue;
    }
    const double br = best_reply(spec.alpha(i), spec.a_max(i), xh);
    if (std::abs(a - br) > tol::kConfirm * std::max(1.0, std::abs(br))) {
      fail(i, SceViolation::Condition::rationality, "action is not the best reply to the conjecture");
    }
    // Feedback equality: with a_i > 0 the message pins down the state.
    if (a > tol::kActive && std::abs(xh - x(i)) > tol::kConfirm * std::max(1.0, std::abs(x(i)))) {
      fail(i, SceViolation::Condition::confirmation, "conjecture contradicted by the realized payoff");
    }
  }
  return check;
}

double welfare(const GameSpec& spec, double beta, const Vector& actions) {
  const double total = actions.sum();
  double w = 0.0;
  for (int i = 0; i < spec.size(); ++i) w += payoff(spec, actions, i) + beta * (total - actions(i));
  return w;
}

SocialOptimum social_optimum(const GameSpec& spec, double beta) {
  const int n = spec.size();
  const Matrix& z = spec.net.z();
  const Matrix system = Matrix::Identity(n, n) - (z + z.transpose());
  const Vector rhs = spec.alpha.array() + (n - 1) * beta;

  SocialOptimum out;
  Eigen::FullPivLU<Matrix> lu(system);
  lu.setThreshold(1e-12);
  if (n > 0 && !lu.isInvertible()) {
    out.degenerate = true;
    return out;
  }
  out.actions = n > 0 ? Vector(lu.solve(rhs)) : Vector(0);
  out.negative_components = (out.actions.array() < 0.0).any();
  out.above_cap = (out.actions.array() > spec.a_max.array()).any();
  Eigen::LLT<Matrix> llt(system);
  out.is_maximum = llt.info() == Eigen::Success;
  return out;
}

}  // namespace scenet
