#include <scenet/kernels.hpp>

#include <Eigen/LU>

namespace scenet::kernels {

ActiveSetSolution solve_active_set(const Matrix& z, const Vector& alpha, AgentMask active) {
  const int n = static_cast<int>(z.rows());
  const auto idx = agents_of(active, n);
  const auto m = static_cast<Eigen::Index>(idx.size());

  ActiveSetSolution out;
  out.active = active;
  out.actions = Vector::Zero(n);
  if (m == 0) return out;

  Matrix system(m, m);
  Vector rhs(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    rhs(a) = alpha(idx[a]);
    for (Eigen::Index b = 0; b < m; ++b) {
      system(a, b) = (a == b ? 1.0 : 0.0) - z(idx[a], idx[b]);
    }
  }
  Eigen::FullPivLU<Matrix> lu(system);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    out.singular = true;
    const Vector trial = lu.solve(rhs);
    out.consistent = (system * trial - rhs).cwiseAbs().maxCoeff() <= 1e-9;
    return out;
  }
  const Vector sol = lu.solve(rhs);
  for (Eigen::Index a = 0; a < m; ++a) out.actions(idx[a]) = sol(a);
  return out;
}

std::vector<ActiveSetSolution> solve_active_sets_serial(const Matrix& z, const Vector& alpha,
                                                        std::span<const AgentMask> candidates) {
  std::vector<ActiveSetSolution> out(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    out[k] = solve_active_set(z, alpha, candidates[k]);
  }
  return out;
}

}  // namespace scenet::kernels
