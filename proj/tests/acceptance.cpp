// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is non-zero if any criterion fails.

#include "support.hpp"

#include <scenet/cli.hpp>
#include <scenet/learning.hpp>
#include <scenet/scenario.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace scenet;
using namespace testing;

namespace {

// Tolerances of each criterion.
constexpr double kPositiveTol = 5e-4;
constexpr double kNegativeTol = 1e-3;
constexpr double kMixedTol = 1e-3;
constexpr double kLineNeTol = 1e-3;
constexpr double kGlobalSceTol = 2e-3;
constexpr double kResidualTol = 1e-10;
constexpr double kTypoOracleTol = 1e-9;
constexpr double kEigenTol = 0.15;

class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  void check(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    details_.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details_.push_back("     " + what); }

  bool finish() const {
    std::cout << (pass_ ? "[PASS] " : "[FAIL] ") << title_ << "\n";
    for (const auto& d : details_) std::cout << "    " << d << "\n";
    return pass_;
  }

 private:
  std::string title_;
  bool pass_ = true;
  std::vector<std::string> details_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + ")";
}

std::string scenario_path(const std::string& name) {
  return std::string(SCENET_SCENARIO_DIR) + "/" + name + ".json";
}

const EquilibriumRecord* find_active(const EquilibriumSet& set, std::vector<int> agents) {
  const AgentMask m = mask_of(agents);
  for (const auto& r : set.records) {
    if (r.active_set == m) return &r;
  }
  return nullptr;
}

void check_column(Criterion& c, const EquilibriumSet& set, std::vector<int> agents, const Vector& expected,
                  double tol) {
  const int n = static_cast<int>(expected.size());
  const std::string label = format_agent_set(mask_of(agents), n);
  const EquilibriumRecord* r = find_active(set, agents);
  if (!r) {
    c.check(false, "column " + label + ": no SCE with this active set");
    return;
  }
  const double d = sup_diff(r->actions, expected);
  c.check(d <= tol, "column " + label + " " + fmt(r->actions) + " vs " + fmt(expected) + ", |diff| = " + fmt(d));
}

bool positive_network() {
  Criterion c("positive network: 16 SCE, one NE, reference columns (sce via the CLI)");
  std::ostringstream out, err;
  const int code = run_cli({"sce", "--input", scenario_path("positive")}, out, err);
  c.check(code == exit_code::ok, "sce exit code " + std::to_string(code));
  const auto rows = parse_csv(out.str());
  const std::size_t count = rows.empty() ? 0 : rows.size() - 1;
  c.check(count == 16, "SCE rows: " + std::to_string(count) + " (expected 16)");

  EquilibriumSet set;
  int ne = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EquilibriumRecord r;
    r.active_set = static_cast<AgentMask>(std::stoull(rows[k][0]));
    r.actions.resize(4);
    for (int i = 0; i < 4; ++i) r.actions(i) = std::stod(rows[k][2 + static_cast<std::size_t>(i)]);
    if (rows[k][1] == "NE") ++ne;
    set.records.push_back(r);
  }
  c.check(ne == 1, "NE rows: " + std::to_string(ne) + " (expected 1)");
  check_column(c, set, {0, 1, 2, 3}, vec({0.1292, 0.1750, 0.1, 0.1458}), kPositiveTol);
  check_column(c, set, {0, 1, 3}, vec({0.125, 0.15, 0, 0.125}), kPositiveTol);
  check_column(c, set, {0, 1, 2}, vec({0.1, 0.14, 0.1, 0}), kPositiveTol);
  check_column(c, set, {1, 2, 3}, vec({0, 0.144, 0.1, 0.12}), kPositiveTol);
  return c.finish();
}

bool negative_network() {
  Criterion c("negative network: 13 SCE, 3 NE, reference {1,2,4} profile");
  const GameSpec spec = to_game(load_scenario(scenario_path("negative")));
  const EquilibriumSet sce = enumerate_sce(spec);
  c.check(sce.records.size() == 13, "SCE count: " + std::to_string(sce.records.size()) + " (expected 13)");
  const std::size_t ne = sce.count_kind(EquilibriumKind::ne);
  c.check(ne == 3, "NE count: " + std::to_string(ne) + " (expected 3)");
  for (const auto& agents : std::vector<std::vector<int>>{{0, 1, 3}, {1, 2, 3}, {0, 2}}) {
    const std::string label = format_agent_set(mask_of(agents), 4);
    const EquilibriumRecord* r = find_active(sce, agents);
    if (!r) {
      c.check(false, label + ": no SCE with this active set");
      continue;
    }
    std::string why;
    if (r->kind != EquilibriumKind::ne) {
      for (int i = 0; i < 4; ++i) {
        if (contains(r->active_set, i)) continue;
        const double gain = spec.alpha(i) + aggregate(spec.net, r->actions, i);
        if (gain > 0.0) why += " agent " + std::to_string(i + 1) + " has alpha + x = " + fmt(gain) + " > 0;";
      }
    }
    c.check(r->kind == EquilibriumKind::ne, label + " is " + std::string(to_string(r->kind)) + why);
  }
  check_column(c, sce, {0, 1, 3}, vec({0.0625, 0.025, 0, 0.0625}), kNegativeTol);
  return c.finish();
}

bool mixed_network() {
  Criterion c("mixed network: 16 SCE, one NE, reference cells and exact solves");
  const Scenario s = load_scenario(scenario_path("mixed"));
  const GameSpec spec = to_game(s);
  const EquilibriumSet sce = enumerate_sce(spec);
  c.check(sce.records.size() == 16, "SCE count: " + std::to_string(sce.records.size()) + " (expected 16)");
  c.check(sce.count_kind(EquilibriumKind::ne) == 1,
          "NE count: " + std::to_string(sce.count_kind(EquilibriumKind::ne)) + " (expected 1)");
  const EquilibriumRecord* all = find_active(sce, {0, 1, 2, 3});
  if (!all) {
    c.check(false, "no all-active SCE");
    return c.finish();
  }
  const Vector reference = vec({0.1603, 0.0412, 0.1336});
  for (int k = 0; k < 3; ++k) {
    const double got = all->actions(k + 1);
    c.check(std::abs(got - reference(k)) <= kMixedTol,
            "a_" + std::to_string(k + 2) + " = " + fmt(got) + " vs reference " + fmt(reference(k)));
  }

  // Reference cells that disagree with the game: compare with an independent solve.
  struct Typo {
    std::vector<int> agents;
    int agent;
    double reference;
  };
  for (const Typo& t : {Typo{{0, 1, 2, 3}, 0, 0.1257}, Typo{{0, 1, 2}, 2, 0.731}, Typo{{0, 2, 3}, 2, 0.720},
                        Typo{{1, 2}, 2, 0.0729}}) {
    const Vector oracle = restricted_solve(s.z, s.alpha, t.agents);
    const EquilibriumRecord* r = find_active(sce, t.agents);
    const std::string cell =
        "a_" + std::to_string(t.agent + 1) + " in " + format_agent_set(mask_of(t.agents), 4);
    if (!r) {
      c.check(false, cell + ": no SCE with this active set");
      continue;
    }
    const double got = r->actions(t.agent);
    c.check(std::abs(got - oracle(t.agent)) <= kTypoOracleTol,
            cell + " = " + fmt(got) + ", oracle " + fmt(oracle(t.agent)) + ", reference " + fmt(t.reference));
  }
  c.note("reference typos: the all-active a_1 and three a_3 cells do not solve the linear system");
  return c.finish();
}

bool line_and_complete() {
  Criterion c("line and complete networks: Nash profiles and the global SCE");
  const Scenario line = load_scenario(scenario_path("global_line"));
  const Scenario full = load_scenario(scenario_path("global_complete"));
  const Vector line_ne = bonacich(WeightedNetwork(line.z), line.alpha).values;
  const Vector full_ne = bonacich(WeightedNetwork(full.z), full.alpha).values;
  const double d_line = sup_diff(line_ne, vec({0.130, 0.152, 0.130}));
  const double d_full = sup_diff(full_ne, Vector::Constant(3, 0.167));
  c.check(d_line <= kLineNeTol, "line NE " + fmt(line_ne) + ", |diff| = " + fmt(d_line));
  c.check(d_full <= kLineNeTol, "complete NE " + fmt(full_ne) + ", |diff| = " + fmt(d_full));

  const GlobalGameSpec g = to_global_game(line);
  const GlobalSolution s = solve_global_sce(g);
  const Vector h = global_residual_oracle(line.z, line.alpha(0), line.beta, line.c, s.actions);
  const double residual = h.cwiseAbs().maxCoeff();
  c.check(s.converged && residual < kResidualTol,
          "global SCE residual max|H| = " + fmt(residual) + " (" + std::string(to_string(s.method)) + ", " +
              std::to_string(s.iterations) + " iterations)");
  const Vector reference = vec({1.569, 1.679, 1.569});
  const double d_sce = sup_diff(s.actions, reference);
  c.check(d_sce <= kGlobalSceTol, "global SCE " + fmt(s.actions) + " vs reference " + fmt(reference) +
                                      ", |diff| = " + fmt(d_sce));
  const Vector at_reference = global_residual_oracle(line.z, line.alpha(0), line.beta, line.c, reference);
  c.note("max|H| at the reference profile: " + fmt(at_reference.cwiseAbs().maxCoeff()));
  return c.finish();
}

bool learning_dynamics() {
  Criterion c("learning dynamics: gamma 0.9 converges, gamma 1.0 oscillates");
  {
    const Scenario s = load_scenario(scenario_path("learn_gamma09"));
    const GameSpec spec = to_game(s);
    const Trajectory t = run_learning(spec, s.initial_conjectures, learning_options(s));
    c.check(t.classification == Classification::converged,
            "gamma 0.9: " + std::string(to_string(t.classification)) + " after " + std::to_string(t.iterations) +
                " steps");
    const auto ne = solve_full_ne(spec);
    if (t.limit && ne.records.size() == 1) {
      c.check(is_sce(spec, t.limit->actions, t.limit->conjectures).ok, "gamma 0.9: limit passes is_sce");
      const double d = sup_diff(t.limit->actions, ne.records[0].actions);
      c.check(d <= 1e-9, "gamma 0.9: limit " + fmt(t.limit->actions) + " equals the NE, |diff| = " + fmt(d));
    } else {
      c.check(false, "gamma 0.9: no limit or no unique NE");
    }
  }
  {
    const Scenario s = load_scenario(scenario_path("learn_gamma10"));
    const GameSpec spec = to_game(s);
    const Trajectory t = run_learning(spec, s.initial_conjectures, learning_options(s));
    c.check(t.classification != Classification::converged,
            "gamma 1.0: " + std::string(to_string(t.classification)));
    c.check(t.classification == Classification::oscillating && t.oscillation.has_value(),
            "gamma 1.0: oscillation reported");
    if (t.oscillation) {
      const bool agents_ok = contains(t.oscillation->agents, 0) && contains(t.oscillation->agents, 3);
      c.check(agents_ok, "gamma 1.0: cycle agents " + format_agent_set(t.oscillation->agents, 4) + ", period " +
                             std::to_string(t.oscillation->period) +
                             (t.oscillation->drifting ? ", drifting" : ""));
    }
  }
  return c.finish();
}

bool has_profile(const EquilibriumSet& set, const Vector& a, double tol) {
  for (const auto& r : set.records) {
    if (sup_diff(r.actions, a) <= tol) return true;
  }
  return false;
}

void ne_subset_of_sce(Criterion& c) {
  Rng rng(2001);
  int violations = 0, ne_total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const GameSpec spec = random_game(rng, rng.integer(1, 6), rng.uniform(0.1, 0.8));
    const auto ne = solve_full_ne(spec);
    const auto sce = enumerate_sce(spec);
    for (const auto& r : ne.records) {
      ++ne_total;
      if (!has_profile(sce, r.actions, 1e-9)) ++violations;
    }
  }
  c.check(violations == 0, "NE subset of SCE: 200 games, " + std::to_string(ne_total) + " NE, " +
                               std::to_string(violations) + " violations");
}

void limit_is_sce(Criterion& c) {
  Rng rng(2002);
  int violations = 0, converged = 0, dropout = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = rng.integer(1, 6);
    Matrix z = random_matrix(rng, n, 1.0);
    const double r = radius(z);
    if (r > 0.0) z *= rng.uniform(0.1, 0.95) / r;
    Vector alpha(n), x0(n);
    for (int i = 0; i < n; ++i) alpha(i) = rng.uniform(-0.1, 0.3);
    const GameSpec spec = GameSpec::make(WeightedNetwork(z), alpha);
    for (int i = 0; i < n; ++i) x0(i) = rng.uniform(std::max(spec.x_lo(i), -0.4), std::min(spec.x_hi(i), 0.4));
    const Trajectory t = run_learning(spec, x0);
    bool monotone = t.monotone_dropout;
    for (std::size_t k = 0; k + 1 < t.steps.size(); ++k) {
      for (int i = 0; i < n; ++i) {
        if (t.steps[k].actions(i) == 0.0 && t.steps[k + 1].actions(i) != 0.0) monotone = false;
      }
    }
    if (!monotone) ++dropout;
    if (t.classification == Classification::converged) {
      ++converged;
      if (!t.limit || !is_sce(spec, t.limit->actions, t.limit->conjectures).ok) ++violations;
    }
  }
  c.check(violations == 0 && dropout == 0, "limit is SCE: 500 trajectories, " + std::to_string(converged) +
                                               " converged, " + std::to_string(violations) +
                                               " non-SCE limits, " + std::to_string(dropout) +
                                               " inactive-set monotonicity violations");
}

void positivity(Criterion& c) {
  struct Family {
    const char* name;
    Matrix (*make)(Rng&, int);
  };
  Rng rng(2003);
  for (const Family& f : {Family{"bounded", random_bounded}, Family{"negative+limited", random_negative_limited},
                          Family{"symmetrizable-limited", random_symmetrizable_limited}}) {
    int negative = 0, off_condition = 0;
    std::string example;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = rng.integer(2, 8);
      const Matrix z = f.make(rng, n);
      const auto report = interior_conditions(WeightedNetwork(z));
      if (!report.any_sufficient()) ++off_condition;
      if (report.degenerate || !report.positive) {
        ++negative;
        if (example.empty()) {
          example = "n = " + std::to_string(n) + ", min entry " +
                    fmt(report.degenerate ? NAN : report.solution.minCoeff());
        }
      }
    }
    c.check(negative == 0 && off_condition == 0,
            std::string("(I - Z)^-1 1 >> 0 under ") + f.name + ": " + std::to_string(200 - negative) +
                "/200 positive" + (example.empty() ? "" : ", first failure " + example) +
                (off_condition ? ", " + std::to_string(off_condition) + " outside the condition" : ""));
  }
}

void grid_oracle(Criterion& c) {
  Rng rng(2004);
  int games = 0, mismatches = 0;
  while (games < 50) {
    const int n = rng.integer(1, 3);
    Matrix z = random_matrix(rng, n, 0.6, 0.9);
    if (radius(z) > 0.8) continue;
    Vector alpha(n);
    for (int i = 0; i < n; ++i) alpha(i) = rng.uniform(-0.2, 0.4);
    const GameSpec spec = GameSpec::make(WeightedNetwork(z), alpha, Vector::Constant(n, 10.0));
    const auto ne = solve_full_ne(spec);
    if (!ne.degenerate.empty()) continue;
    bool small = true;
    for (const auto& r : ne.records) small = small && r.actions.maxCoeff() < 1.8;
    if (!small) continue;
    ++games;
    const auto grid = grid_ne_oracle(spec, 1e-3, 2.0);
    bool ok = grid.size() == ne.records.size();
    for (const auto& g : grid) ok = ok && has_profile(ne, g, 1e-2);
    if (!ok) ++mismatches;
  }
  c.check(mismatches == 0, "grid oracle (step 1e-3): 50 games with n <= 3, " + std::to_string(mismatches) +
                               " disagreements");
}

GlobalGameSpec contraction_instance(Rng& rng) {
  const int n = rng.integer(3, 5);
  const Matrix z = random_nonnegative(rng, n, 0.3, 0.95);
  const double beta = rng.uniform(0.05, 1.0);
  Vector c(n);
  for (int i = 0; i < n; ++i) c(i) = rng.uniform(0.01, 0.99) * z.row(i).sum() / (beta * (n - 1));
  return GlobalGameSpec::make(game(z, rng.uniform(0.05, 0.5)), beta, c);
}

void phi_monotone(Criterion& c) {
  Rng rng(2005);
  int violations = 0, failures = 0;
  for (int pair = 0; pair < 100; ++pair) {
    const GlobalGameSpec g1 = contraction_instance(rng);
    GlobalGameSpec g2 = g1;
    const int n = g1.size();
    for (int i = 0; i < n; ++i) {
      const double top = g1.base.net.z().row(i).sum() / (g1.beta * (n - 1));
      g2.c(i) = rng.uniform(g1.c(i), 0.99 * top);
    }
    const GlobalSolution s1 = solve_global_sce(g1);
    const GlobalSolution s2 = solve_global_sce(g2);
    if (!s1.converged || !s2.converged || !check_homeo2(g1).all || !check_homeo2(g2).all) {
      ++failures;
      continue;
    }
    if (!(s1.actions.array() <= s2.actions.array() + 1e-9).all()) ++violations;
  }
  c.check(violations == 0 && failures == 0, "Phi monotone: 100 pairs c <= c', " + std::to_string(violations) +
                                                " violations, " + std::to_string(failures) + " unsolved");
}

void interlacing(Criterion& c) {
  Rng rng(2006);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(2, 8);
    const WeightedNetwork net(random_symmetrizable_limited(rng, n));
    const auto full = symmetrize_decompose(net);
    AgentMask m = 0;
    while (m == 0 || m == full_set(n)) m = static_cast<AgentMask>(rng.integer(1, static_cast<int>(full_set(n))));
    const auto sub = symmetrize_decompose(submatrix(net, m));
    if (!full || !sub) {
      ++violations;
      continue;
    }
    const double whole = spectral_radius(full.decomposition->symmetrized());
    const double part = spectral_radius(sub.decomposition->symmetrized());
    if (part > whole + 1e-9) ++violations;
  }
  c.check(violations == 0, "interlacing rho(Z~_J) <= rho(Z~): 100 instances, " + std::to_string(violations) +
                               " violations");
}

bool properties() {
  Criterion c("property suite");
  ne_subset_of_sce(c);
  limit_is_sce(c);
  positivity(c);
  grid_oracle(c);
  phi_monotone(c);
  interlacing(c);
  return c.finish();
}

bool eigenvalue_statistic() {
  Criterion c("random symmetrizable networks: mean lambda_max near k mu + sigma^2 / mu");
  const double k = 4.0, mu = 0.05, sigma2 = 1e-4;
  const double target = k * mu + sigma2 / mu;
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const WeightedNetwork net = random_symmetrizable({500, k, mu, sigma2, seed});
    const auto d = symmetrize_decompose(net);
    if (!d) {
      c.check(false, "seed " + std::to_string(seed) + ": not symmetrizable");
      return c.finish();
    }
    sum += largest_eigenvalue_symmetric(d.decomposition->symmetrized());
  }
  const double mean = sum / 20.0;
  const double rel = std::abs(mean - target) / target;
  c.check(rel <= kEigenTol, "mean over 20 seeds " + fmt(mean) + " vs " + fmt(target) + ", relative error " +
                                fmt(rel) + " (limit " + fmt(kEigenTol) + ")");
  c.note("sparse graphs with mean degree k have a top adjacency eigenvalue near k + 1, so mu (k + 1) = " +
         fmt(mu * (k + 1.0)) + " is the closer reference");
  return c.finish();
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  int failed = 0;
  for (bool (*criterion)() : {positive_network, negative_network, mixed_network, line_and_complete, learning_dynamics,
                                    properties, eigenvalue_statistic}) {
    try {
      if (!criterion()) ++failed;
    } catch (const std::exception& e) {
      std::cout << "[FAIL] criterion threw: " << e.what() << "\n";
      ++failed;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << failed << " of 7 criteria failed (" << fmt(secs) << " s)\n";
  return failed == 0 ? 0 : 1;
}
