#ifndef SCENET_CSV_HPP
#define SCENET_CSV_HPP

#include <scenet/global_ext.hpp>
#include <scenet/learning.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace scenet::csv {

/// 12 significant digits, '.' separator, "-0" printed as "0", independent of locale.
std::string number(double v);

/// mask,kind,a1..an,xhat1..xhatn
void write_equilibria(std::ostream& os, int n, const std::vector<EquilibriumRecord>& records);

/// t,agent,conjecture,action,payoff with 1-based agents.
void write_trajectory(std::ostream& os, const Trajectory& traj);

/// key=value lines describing the run outcome.
void write_trajectory_summary(std::ostream& os, const Trajectory& traj);

/// c1..cn,a1..an,residual,iterations,method
void write_phi_map(std::ostream& os, int n, const std::vector<PhiPoint>& points);

}  // namespace scenet::csv

#endif  // SCENET_CSV_HPP
