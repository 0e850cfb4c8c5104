#include <scenet/cli.hpp>
#include <scenet/csv.hpp>
#include <scenet/scenario.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

namespace scenet {

namespace {

struct Flags {
  std::string input;
  std::string output;
  std::string summary;
  std::string format = "csv";
  std::optional<double> tol;
  std::optional<long> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<int> samples;
  bool no_strict = false;
  int grid_steps = 5;
  std::string method = "automatic";
};

std::string quoted(const std::string& s) {
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }

 private:
  std::ostream& fallback_;
  std::unique_ptr<std::ofstream> file_;
};

Scenario load(const Flags& f) {
  Scenario s = load_scenario(f.input, !f.no_strict);
  if (f.tol) s.tol = *f.tol;
  if (f.max_iter) s.max_iter = *f.max_iter;
  if (f.seed) s.seed = *f.seed;
  if (f.epsilon) s.epsilon = *f.epsilon;
  if (f.samples) s.samples = *f.samples;
  if (!(s.tol > 0.0) || s.max_iter < 1 || !(s.epsilon > 0.0) || s.samples < 0) {
    throw UsageError("--tol and --epsilon must be positive, --max-iter >= 1, --samples >= 0");
  }
  return s;
}

void warn_cap(const GameSpec& spec, const Vector& actions, std::ostream& err) {
  const AgentMask capped = cap_binding_agents(spec, actions);
  if (capped != 0) {
    err << "warning: action cap binding for agents " << format_agent_set(capped, spec.size()) << '\n';
  }
}

void report_diagnostics(const GameSpec& spec, const EquilibriumSet& set, std::ostream& err) {
  const int n = spec.size();
  for (const auto& d : set.degenerate) {
    err << "warning: singular system for active set " << format_agent_set(d.active, n)
        << (d.consistent ? " (continuum of solutions)" : " (inconsistent)") << '\n';
  }
  for (AgentMask m : set.cap_rejected) {
    err << "warning: action cap binding for candidate active set " << format_agent_set(m, n)
        << "; candidate dropped\n";
  }
}

int cmd_check(const Flags& f, std::ostream& out, std::ostream&) {
  const Scenario s = load(f);
  const GameSpec spec = to_game(s);
  Sink sink(f.output, out);
  auto& os = sink.stream();
  os << "assumption,holds,value,witness\n";
  for (Assumption a : kAllAssumptions) {
    const auto r = check_assumption(spec.net, a);
    os << to_string(a) << ',' << (r.holds ? "true" : "false") << ','
       << (r.value ? csv::number(*r.value) : std::string()) << ',' << quoted(r.witness()) << '\n';
  }
  os << "structure,true,," << quoted(std::string(to_string(classify_structure(spec.net).kind))) << '\n';
  const auto interior = interior_conditions(spec.net);
  os << "interior-positive," << (interior.positive ? "true" : "false") << ",,"
     << quoted(interior.degenerate ? "I - Z is singular" : "") << '\n';
  os << "justifiable-inactivity,true,,"
     << quoted(format_agent_set(justifiable_inactivity_set(spec), spec.size())) << '\n';
  return exit_code::ok;
}

int cmd_equilibria(const Flags& f, std::ostream& out, std::ostream& err, bool sce) {
  const Scenario s = load(f);
  const GameSpec spec = to_game(s);
  const EquilibriumSet set = sce ? enumerate_sce(spec) : solve_full_ne(spec);
  report_diagnostics(spec, set, err);
  Sink sink(f.output, out);
  csv::write_equilibria(sink.stream(), spec.size(), set.records);
  return exit_code::ok;
}

int cmd_learn(const Flags& f, std::ostream& out, std::ostream& err) {
  const Scenario s = load(f);
  const GameSpec spec = to_game(s);
  LearningOptions opts = learning_options(s);
  opts.strict_clamp = !f.no_strict;
  const Trajectory traj = run_learning(spec, s.initial_conjectures, opts);

  {
    Sink sink(f.output, out);
    csv::write_trajectory(sink.stream(), traj);
  }
  std::string summary_path = f.summary;
  if (summary_path.empty() && !f.output.empty()) summary_path = f.output + ".summary";
  {
    Sink sink(summary_path, err);
    csv::write_trajectory_summary(sink.stream(), traj);
  }
  warn_cap(spec, traj.final_actions, err);
  if (traj.classification != Classification::converged) {
    err << "learning did not converge: " << to_string(traj.classification);
    if (traj.oscillation) {
      err << " (period " << traj.oscillation->period << (traj.oscillation->drifting ? ", drifting" : "")
          << ", agents " << format_agent_set(traj.oscillation->agents, spec.size()) << ')';
    }
    err << '\n';
    return exit_code::numeric;
  }
  if (!traj.limit_check || !traj.limit_check->ok) {
    err << "limit failed the selfconfirming check: "
        << (traj.limit_check ? traj.limit_check->describe() : std::string("missing")) << '\n';
    return exit_code::numeric;
  }
  return exit_code::ok;
}

int cmd_stability(const Flags& f, std::ostream& out, std::ostream& err) {
  const Scenario s = load(f);
  const GameSpec spec = to_game(s);
  const EquilibriumSet set = enumerate_sce(spec);
  report_diagnostics(spec, set, err);
  ProbeOptions probe;
  probe.epsilon = s.epsilon;
  probe.samples = s.samples;
  probe.seed = s.seed;
  probe.learning = learning_options(s);

  Sink sink(f.output, out);
  auto& os = sink.stream();
  os << "mask,kind,rho,analytic,action_return,conjecture_return,converged,samples,epsilon,seed\n";
  for (const auto& rec : set.records) {
    const auto a = analytic_stability(spec, rec);
    const auto e = probe_stability(spec, rec, probe);
    os << rec.active_set << ',' << to_string(rec.kind) << ',' << csv::number(a.rho) << ','
       << (a.stable ? "stable" : "inconclusive") << ',' << csv::number(e.action_fraction()) << ','
       << csv::number(e.conjecture_fraction()) << ',' << e.converged << ',' << e.samples << ','
       << csv::number(e.epsilon) << ',' << e.seed << '\n';
  }
  return exit_code::ok;
}

GlobalSolveOptions global_options(const Scenario& s, const Flags& f) {
  GlobalSolveOptions o;
  o.tol = s.tol;
  o.max_iter = s.max_iter;
  o.method = parse_global_method(f.method);
  return o;
}

int cmd_global_sce(const Flags& f, std::ostream& out, std::ostream& err) {
  const Scenario s = load(f);
  const GlobalGameSpec g = to_global_game(s);
  const GlobalSolution sol = solve_global_sce(g, global_options(s, f));
  const Vector h = fixed_point_residual(g, sol.actions);

  Sink sink(f.output, out);
  auto& os = sink.stream();
  os << "agent,c,action,xhat,yhat,true_centrality,residual\n";
  for (int i = 0; i < g.size(); ++i) {
    const auto tc = true_centrality(g, sol.actions, i);
    os << i + 1 << ',' << csv::number(g.c(i)) << ',' << csv::number(sol.actions(i)) << ','
       << csv::number(sol.conjectures.x_hat(i)) << ',' << csv::number(sol.conjectures.y_hat(i)) << ','
       << (tc.defined ? csv::number(tc.value) : std::string("nan")) << ',' << csv::number(h(i)) << '\n';
  }
  err << "method=" << to_string(sol.method) << " iterations=" << sol.iterations
      << " max_residual=" << csv::number(sol.residual) << '\n';
  warn_cap(g.base, sol.actions, err);
  if (!sol.converged) {
    err << "global fixed point not certified below tol " << csv::number(s.tol) << '\n';
    return exit_code::numeric;
  }
  return exit_code::ok;
}

int cmd_phi_map(const Flags& f, std::ostream& out, std::ostream& err) {
  const Scenario s = load(f);
  const GlobalGameSpec g = to_global_game(s);
  const auto grid = admissible_grid(g, f.grid_steps);
  const auto points = phi_map(g, grid, global_options(s, f));
  Sink sink(f.output, out);
  csv::write_phi_map(sink.stream(), g.size(), points);
  int failures = 0;
  for (const auto& p : points) {
    if (!p.solution || !p.solution->converged) ++failures;
    if (!p.error.empty()) err << "grid point failed: " << p.error << '\n';
  }
  if (failures > 0) {
    err << failures << " of " << points.size() << " grid points did not converge\n";
    return exit_code::numeric;
  }
  return exit_code::ok;
}

int cmd_normalize(const Flags& f, std::ostream& out, std::ostream&) {
  const Scenario s = load(f);
  Sink sink(f.output, out);
  sink.stream() << emit_scenario(s);
  return exit_code::ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria, learning dynamics and stability for linear-quadratic network games"};
  app.require_subcommand(1);
  Flags f;

  struct Command {
    const char* name;
    const char* help;
    std::function<int(std::ostream&, std::ostream&)> run;
  };
  const std::vector<Command> commands = {
      {"check", "Report structural assumptions on Z",
       [&](std::ostream& o, std::ostream& e) { return cmd_check(f, o, e); }},
      {"ne", "Nash equilibria of the full game",
       [&](std::ostream& o, std::ostream& e) { return cmd_equilibria(f, o, e, false); }},
      {"sce", "Enumerate selfconfirming equilibria",
       [&](std::ostream& o, std::ostream& e) { return cmd_equilibria(f, o, e, true); }},
      {"learn", "Simulate the learning dynamics from initial_conjectures",
       [&](std::ostream& o, std::ostream& e) { return cmd_learn(f, o, e); }},
      {"stability", "Analytic and probe-based stability of every SCE",
       [&](std::ostream& o, std::ostream& e) { return cmd_stability(f, o, e); }},
      {"global-sce", "Fixed point of the global-externality game",
       [&](std::ostream& o, std::ostream& e) { return cmd_global_sce(f, o, e); }},
      {"phi-map", "Fixed points over a grid of perceived centralities",
       [&](std::ostream& o, std::ostream& e) { return cmd_phi_map(f, o, e); }},
      {"normalize", "Print the scenario with all defaults filled in",
       [&](std::ostream& o, std::ostream& e) { return cmd_normalize(f, o, e); }},
  };

  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--input", f.input, "Scenario JSON file")->required();
    sub->add_option("--output", f.output, "Write the table here instead of stdout");
    sub->add_option("--tol", f.tol, "Convergence tolerance");
    sub->add_option("--max-iter", f.max_iter, "Iteration limit");
    sub->add_option("--seed", f.seed, "Seed for stability probes");
    sub->add_option("--epsilon", f.epsilon, "Probe radius");
    sub->add_option("--samples", f.samples, "Number of stability probes");
    sub->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv"}));
    sub->add_flag("--no-strict", f.no_strict, "Accept unknown scenario keys and conjecture clamping");
    if (std::string(c.name) == "learn") sub->add_option("--summary", f.summary, "Summary file");
    if (std::string(c.name) == "phi-map") {
      sub->add_option("--grid-steps", f.grid_steps, "Grid points per agent")->check(CLI::PositiveNumber);
    }
    if (std::string(c.name) == "global-sce" || std::string(c.name) == "phi-map") {
      sub->add_option("--method", f.method, "automatic, plain, damped or gauss-seidel")
          ->check(CLI::IsMember({"automatic", "plain", "damped", "gauss-seidel"}));
    }
    subs.push_back(sub);
  }

  std::vector<std::string> argv_storage{"scenet"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    for (std::size_t k = 0; k < commands.size(); ++k) {
      if (subs[k]->parsed()) return commands[k].run(out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return exit_code::numeric;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return exit_code::numeric;
  }
  return exit_code::usage;
}

}  // namespace scenet
