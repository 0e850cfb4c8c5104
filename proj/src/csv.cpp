#include <scenet/csv.hpp>

#include <charconv>
#include <cmath>

namespace scenet::csv {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  std::string s(buf, res.ptr);
  return s == "-0" ? "0" : s;
}

namespace {

void header_columns(std::ostream& os, const char* prefix, int n) {
  for (int i = 1; i <= n; ++i) os << ',' << prefix << i;
}

void row_values(std::ostream& os, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << number(v(i));
}

}  // namespace

void write_equilibria(std::ostream& os, int n, const std::vector<EquilibriumRecord>& records) {
  os << "mask,kind";
  header_columns(os, "a", n);
  header_columns(os, "xhat", n);
  os << '\n';
  for (const auto& r : records) {
    os << r.active_set << ',' << to_string(r.kind);
    row_values(os, r.actions);
    row_values(os, r.conjectures);
    os << '\n';
  }
}

void write_trajectory(std::ostream& os, const Trajectory& traj) {
  os << "t,agent,conjecture,action,payoff\n";
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const auto& p = traj.steps[t];
    for (Eigen::Index i = 0; i < p.actions.size(); ++i) {
      os << t << ',' << i + 1 << ',' << number(p.conjectures(i)) << ',' << number(p.actions(i)) << ','
         << number(p.payoffs(i)) << '\n';
    }
  }
}

void write_trajectory_summary(std::ostream& os, const Trajectory& traj) {
  const int n = static_cast<int>(traj.final_conjectures.size());
  os << "classification=" << to_string(traj.classification) << '\n';
  os << "iterations=" << traj.iterations << '\n';
  os << "monotone_dropout=" << (traj.monotone_dropout ? "true" : "false") << '\n';
  os << "clamp_events=" << traj.clamps.size() << '\n';
  if (traj.oscillation) {
    os << "period=" << traj.oscillation->period << '\n';
    os << "drifting=" << (traj.oscillation->drifting ? "true" : "false") << '\n';
    os << "cycle_agents=" << format_agent_set(traj.oscillation->agents, n) << '\n';
  }
  if (traj.limit) {
    os << "limit_kind=" << to_string(traj.limit->kind) << '\n';
    os << "limit_active=" << format_agent_set(traj.limit->active_set, n) << '\n';
    os << "limit_is_sce=" << (traj.limit_check && traj.limit_check->ok ? "true" : "false") << '\n';
    os << "limit_actions=";
    for (int i = 0; i < n; ++i) os << (i ? " " : "") << number(traj.limit->actions(i));
    os << '\n';
  }
  os << "final_conjectures=";
  for (int i = 0; i < n; ++i) os << (i ? " " : "") << number(traj.final_conjectures(i));
  os << '\n';
}

void write_phi_map(std::ostream& os, int n, const std::vector<PhiPoint>& points) {
  for (int i = 1; i <= n; ++i) os << (i > 1 ? "," : "") << 'c' << i;
  header_columns(os, "a", n);
  os << ",residual,iterations,method\n";
  for (const auto& p : points) {
    std::string line;
    for (Eigen::Index i = 0; i < p.c.size(); ++i) line += ',' + number(p.c(i));
    if (!line.empty()) os << line.substr(1);
    if (p.solution) {
      row_values(os, p.solution->actions);
      os << ',' << number(p.solution->residual) << ',' << p.solution->iterations << ','
         << to_string(p.solution->method) << (p.solution->converged ? "" : "-unconverged");
    } else {
      for (int i = 0; i < n; ++i) os << ",nan";
      os << ",nan,0,error";
    }
    os << '\n';
  }
}

}  // namespace scenet::csv
