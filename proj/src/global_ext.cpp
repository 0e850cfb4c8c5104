#include <scenet/global_ext.hpp>
#include <scenet/kernels.hpp>

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <sstream>

namespace scenet {

namespace {

double row_sum(const WeightedNetwork& net, int i) {
  double s = 0.0;
  for (int j = 0; j < net.size(); ++j) {
    if (j != i) s += net(i, j);
  }
  return s;
}

double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

bool close(double a, double b) { return std::abs(a - b) <= tol::kConfirm * std::max(1.0, std::abs(b)); }

}  // namespace

GlobalGameSpec GlobalGameSpec::make(GameSpec base, double beta, Vector c, std::optional<Vector> y_lo,
                                    std::optional<Vector> y_hi) {
  GlobalGameSpec g;
  const int n = base.size();
  g.beta = beta;
  g.c = std::move(c);
  if (y_lo) {
    g.y_lo = std::move(*y_lo);
  } else {
    g.y_lo = Vector::Zero(n);
  }
  if (y_hi) {
    g.y_hi = std::move(*y_hi);
  } else {
    g.y_hi.resize(n);
    const double total = base.a_max.sum();
    for (int i = 0; i < n; ++i) g.y_hi(i) = beta * (total - base.a_max(i));
  }
  g.base = std::move(base);
  g.validate();
  return g;
}

void GlobalGameSpec::validate() const {
  base.validate();
  const int n = size();
  if (c.size() != n) throw UsageError("c must have length n");
  if (y_lo.size() != n || y_hi.size() != n) throw UsageError("y_bounds must have length n");
  if (!std::isfinite(beta) || beta < 0.0) throw UsageError("beta must be finite and >= 0");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(c(i))) throw UsageError("c[" + std::to_string(i) + "] must be finite");
    if (!(y_lo(i) <= y_hi(i))) throw UsageError("y_bounds[" + std::to_string(i) + "] must satisfy lo <= hi");
  }
}

Admissibility check_admissible(const GlobalGameSpec& g) {
  const int n = g.size();
  auto fail = [](std::string why) { return Admissibility{false, std::move(why)}; };
  for (int i = 0; i < n; ++i) {
    if (!(g.base.alpha(i) > 0.0)) return fail("alpha must be positive");
    if (g.base.alpha(i) != g.base.alpha(0)) return fail("alpha must be common to all agents");
    for (int j = 0; j < n; ++j) {
      if (g.base.net(i, j) < 0.0) {
        return fail("z[" + std::to_string(i) + "][" + std::to_string(j) + "] must be nonnegative");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    const std::string at = "c[" + std::to_string(i) + "]";
    if (!(g.c(i) > 0.0)) return fail(at + " must be positive");
    if (g.beta > 0.0) {
      const double bound = row_sum(g.base.net, i) / g.beta;
      if (g.c(i) > bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << at << " exceeds sum_j z_ij / beta = " << bound;
        return fail(os.str());
      }
    }
  }
  return {};
}

double global_term(const GlobalGameSpec& g, const Vector& actions, int i) {
  return g.beta * (actions.sum() - actions(i));
}

Vector global_terms(const GlobalGameSpec& g, const Vector& actions) {
  return (g.beta * (Vector::Constant(actions.size(), actions.sum()) - actions)).eval();
}

double global_payoff(const GlobalGameSpec& g, const Vector& actions, int i) {
  return payoff(g.base, actions, i) + global_term(g, actions, i);
}

SceCheck check_global_sce(const GlobalGameSpec& g, const Vector& actions, const GlobalConjecture& conj) {
  const int n = g.size();
  if (actions.size() != n || conj.x_hat.size() != n || conj.y_hat.size() != n) {
    throw UsageError("check_global_sce: length mismatch");
  }
  SceCheck check;
  auto fail = [&](int i, SceViolation::Condition c, std::string detail) {
    check.ok = false;
    check.violations.push_back({i, c, std::move(detail)});
  };
  const Vector x = aggregates(g.base.net, actions);
  const Vector y = global_terms(g, actions);
  for (int i = 0; i < n; ++i) {
    const double a = actions(i);
    const double alpha = g.base.alpha(i);
    if (a <= tol::kActive) {
      if (conj.x_hat(i) > -alpha + tol::kConfirm) {
        fail(i, SceViolation::Condition::rationality, "inactive but xhat > -alpha");
      }
      if (!close(conj.y_hat(i), y(i))) {
        fail(i, SceViolation::Condition::confirmation, "inactive but yhat differs from y");
      }
      continue;
    }
    if (!close(a, best_reply(alpha, g.base.a_max(i), conj.x_hat(i)))) {
      fail(i, SceViolation::Condition::rationality, "action is not alpha + xhat");
    }
    if (!close(conj.y_hat(i), y(i) + a * (x(i) - conj.x_hat(i)))) {
      fail(i, SceViolation::Condition::confirmation, "yhat inconsistent with the realized payoff");
    }
  }
  return check;
}

Centrality bonacich(const WeightedNetwork& net, const Vector& alpha) {
  const int n = net.size();
  if (alpha.size() != n) throw UsageError("bonacich: alpha length mismatch");
  Centrality out;
  if (n == 0) return out;
  Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) - net.z());
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    out.degenerate = true;
    return out;
  }
  out.values = lu.solve(alpha);
  return out;
}

Centrality bonacich(const WeightedNetwork& net, double alpha) {
  return bonacich(net, Vector::Constant(net.size(), alpha));
}

TrueCentrality true_centrality(const GlobalGameSpec& g, const Vector& actions, int i) {
  TrueCentrality t;
  const double y = global_term(g, actions, i);
  if (y == 0.0) return t;
  t.defined = true;
  t.value = aggregate(g.base.net, actions, i) / y;
  const double bound = g.beta > 0.0 ? row_sum(g.base.net, i) / g.beta : std::numeric_limits<double>::infinity();
  t.in_range = t.value >= 0.0 && t.value <= bound * (1.0 + 1e-12);
  return t;
}

GlobalStep global_learn_step(const GlobalGameSpec& g, const Vector& x_hat) {
  GlobalStep s;
  s.actions = best_replies(g.base, x_hat);
  const Vector x = aggregates(g.base.net, s.actions);
  const Vector y = global_terms(g, s.actions);
  const Vector ca = g.c.cwiseProduct(s.actions);
  s.next_y_hat = (s.actions.cwiseProduct(x) + y).cwiseQuotient((Vector::Ones(g.size()) + ca));
  s.next_x_hat = g.c.cwiseProduct(s.next_y_hat);
  return s;
}

Vector fixed_point_residual(const GlobalGameSpec& g, const Vector& actions) {
  const Vector x = aggregates(g.base.net, actions);
  const Vector y = global_terms(g, actions);
  Vector h(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const double a = actions(i);
    const double c = g.c(i);
    h(i) = g.base.alpha(i) + c * (a * x(i) + y(i)) / (1.0 + c * a) - a;
  }
  return h;
}

std::string_view to_string(GlobalMethod m) {
  switch (m) {
    case GlobalMethod::automatic: return "automatic";
    case GlobalMethod::plain: return "plain";
    case GlobalMethod::damped: return "damped";
    case GlobalMethod::gauss_seidel: return "gauss-seidel";
  }
  return "unknown";
}

GlobalMethod parse_global_method(std::string_view id) {
  for (auto m : {GlobalMethod::automatic, GlobalMethod::plain, GlobalMethod::damped, GlobalMethod::gauss_seidel}) {
    if (to_string(m) == id) return m;
  }
  throw UsageError("unknown solver method '" + std::string(id) + "'");
}

double parabola_root(double alpha, double c, double x, double y) {
  const double b = 1.0 - alpha * c - c * x;
  const double k = alpha + c * y;
  const double disc = std::sqrt(b * b + 4.0 * c * k);
  // Two algebraically equal forms; pick the one without cancellation.
  return b >= 0.0 ? 2.0 * k / (b + disc) : (disc - b) / (2.0 * c);
}

Homeo2Check check_homeo2(const GlobalGameSpec& g) {
  const int n = g.size();
  Homeo2Check h;
  h.per_agent.resize(static_cast<std::size_t>(n));
  h.all = n > 0;
  for (int i = 0; i < n; ++i) {
    const double lhs = g.c(i) * g.beta * (n - 1);
    const double s = row_sum(g.base.net, i);
    const bool ok = 0.0 < lhs && lhs < s && s < 2.0;
    h.per_agent[static_cast<std::size_t>(i)] = ok;
    h.all = h.all && ok;
  }
  return h;
}

namespace {

struct Attempt {
  bool converged = false;
  Vector best;
  double best_residual = std::numeric_limits<double>::infinity();
  long iterations = 0;
};

void track(Attempt& at, const GlobalGameSpec& g, const Vector& actions) {
  const double r = sup_norm(fixed_point_residual(g, actions));
  if (r < at.best_residual) {
    at.best_residual = r;
    at.best = actions;
  }
}

bool blown_up(const Vector& a) { return !a.allFinite() || sup_norm(a) > 1e9; }

Attempt iterate_map(const GlobalGameSpec& g, const GlobalSolveOptions& opts, double eta) {
  Attempt at;
  Vector x_hat = Vector::Zero(g.size());
  for (long t = 0; t < opts.max_iter; ++t) {
    const GlobalStep s = global_learn_step(g, x_hat);
    at.iterations = t + 1;
    if (blown_up(s.actions) || !s.next_x_hat.allFinite()) break;
    track(at, g, s.actions);
    if (at.best_residual < opts.tol) {
      at.converged = true;
      break;
    }
    x_hat = (1.0 - eta) * x_hat + eta * s.next_x_hat;
  }
  return at;
}

Attempt gauss_seidel(const GlobalGameSpec& g, const GlobalSolveOptions& opts) {
  Attempt at;
  const int n = g.size();
  const Matrix& z = g.base.net.z();
  Vector a = g.base.alpha;
  for (long t = 0; t < opts.max_iter; ++t) {
    at.iterations = t + 1;
    for (int i = 0; i < n; ++i) {
      const double x = z.row(i).dot(a);
      const double y = g.beta * (a.sum() - a(i));
      a(i) = parabola_root(g.base.alpha(i), g.c(i), x, y);
    }
    if (blown_up(a)) break;
    track(at, g, a);
    if (at.best_residual < opts.tol) {
      at.converged = true;
      break;
    }
  }
  return at;
}

}  // namespace

GlobalSolution solve_global_sce(const GlobalGameSpec& g, const GlobalSolveOptions& opts) {
  const Admissibility adm = check_admissible(g);
  if (!adm.ok) throw UsageError("global-sce: " + adm.reason);
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || !(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw UsageError("global-sce: tol > 0, max_iter >= 1 and damping in (0, 1] required");
  }

  std::vector<GlobalMethod> plan;
  switch (opts.method) {
    case GlobalMethod::automatic:
      if (check_homeo2(g).all) plan.push_back(GlobalMethod::plain);
      plan.push_back(GlobalMethod::damped);
      plan.push_back(GlobalMethod::gauss_seidel);
      break;
    default:
      plan.push_back(opts.method);
  }

  GlobalSolution best;
  best.residual = std::numeric_limits<double>::infinity();
  for (GlobalMethod m : plan) {
    const Attempt at = m == GlobalMethod::gauss_seidel ? gauss_seidel(g, opts)
                       : m == GlobalMethod::plain      ? iterate_map(g, opts, 1.0)
                                                       : iterate_map(g, opts, opts.damping);
    if (at.best.size() != 0 && at.best_residual < best.residual) {
      best.actions = at.best;
      best.residual = at.best_residual;
      best.iterations = at.iterations;
      best.method = m;
      best.converged = at.converged;
    }
    if (at.converged) break;
  }
  if (best.actions.size() == 0) {
    best.actions = Vector::Constant(g.size(), std::numeric_limits<double>::quiet_NaN());
    best.method = plan.back();
  }
  best.conjectures.x_hat = best.actions - g.base.alpha;
  best.conjectures.y_hat = best.conjectures.x_hat.cwiseQuotient(g.c);
  return best;
}

std::vector<PhiPoint> phi_map(const GlobalGameSpec& g, const std::vector<Vector>& grid,
                              const GlobalSolveOptions& opts, Execution exec) {
  std::vector<PhiPoint> out(grid.size());
  kernels::for_each_index(grid.size(), exec, [&](std::size_t k) {
    PhiPoint& p = out[k];
    p.c = grid[k];
    try {
      GlobalGameSpec local = g;
      local.c = grid[k];
      local.validate();
      p.solution = solve_global_sce(local, opts);
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  });
  return out;
}

std::vector<Vector> admissible_grid(const GlobalGameSpec& g, int steps) {
  const int n = g.size();
  if (steps < 1) throw UsageError("grid steps must be >= 1");
  if (!(g.beta > 0.0)) throw UsageError("admissible grid needs beta > 0");
  const double total = std::pow(static_cast<double>(steps), n);
  if (total > 1e6) throw UsageError("admissible grid would have more than 1e6 points");

  Vector upper(n);
  for (int i = 0; i < n; ++i) upper(i) = row_sum(g.base.net, i) / g.beta;

  std::vector<Vector> grid;
  std::vector<int> idx(static_cast<std::size_t>(n), 1);
  while (true) {
    Vector c(n);
    for (int i = 0; i < n; ++i) c(i) = upper(i) * idx[static_cast<std::size_t>(i)] / steps;
    grid.push_back(c);
    // Odometer with the last agent varying fastest.
    int d = n - 1;
    while (d >= 0 && idx[static_cast<std::size_t>(d)] == steps) idx[static_cast<std::size_t>(d--)] = 1;
    if (d < 0) break;
    ++idx[static_cast<std::size_t>(d)];
  }
  return grid;
}

}  // namespace scenet
