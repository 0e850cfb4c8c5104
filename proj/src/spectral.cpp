#include <scenet/network.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace scenet {

namespace {

// Strongly connected components of the support of z (edge i -> j iff
// z(i, j) != 0). The spectrum of z is the union of the spectra of its SCC
// diagonal blocks, so acyclic parts contribute exact zeros instead of the
// eps^(1/k) noise a dense solver produces on nilpotent Jordan blocks.
std::vector<std::vector<int>> strong_components(const Matrix& z) {
  const int n = static_cast<int>(z.rows());
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  std::vector<std::vector<int>> comps;
  int counter = 0;

  struct Frame {
    int v;
    int next;
  };
  for (int s = 0; s < n; ++s) {
    if (index[s] >= 0) continue;
    std::vector<Frame> call{{s, 0}};
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < n) {
        const int w = f.next++;
        if (w == f.v || z(f.v, w) == 0.0) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const int v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        comps.push_back(std::move(comp));
      }
    }
  }
  return comps;
}

bool is_symmetric(const Matrix& b) {
  const double scale = b.cwiseAbs().maxCoeff();
  return (b - b.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

double block_radius(const Matrix& block, std::string_view name) {
  if (is_symmetric(block)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw NumericError("spectral radius: symmetric eigensolver failed for matrix '" +
                         std::string(name) + "'");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // Diagonal similarity to a symmetric matrix keeps the spectrum and the
  // accuracy of the symmetric solver.
  if (block.diagonal().isZero(0.0)) {
    if (auto d = symmetrize_decompose(WeightedNetwork(block)); d) {
      return block_radius(d.decomposition->symmetrized(), name);
    }
  }
  Eigen::EigenSolver<Matrix> es(block, false);
  if (es.info() != Eigen::Success) {
    throw NumericError("spectral radius: eigenvalue iteration did not converge for matrix '" +
                       std::string(name) + "'");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double spectral_radius(const Matrix& z, std::string_view name) {
  if (z.rows() != z.cols()) throw UsageError("spectral radius of a non-square matrix");
  if (z.size() == 0) return 0.0;
  double rho = 0.0;
  for (const auto& comp : strong_components(z)) {
    if (comp.size() < 2) {
      rho = std::max(rho, std::abs(z(comp[0], comp[0])));
      continue;
    }
    const auto m = static_cast<Eigen::Index>(comp.size());
    Matrix block(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) block(a, b) = z(comp[a], comp[b]);
    }
    rho = std::max(rho, block_radius(block, name));
  }
  return rho;
}

double spectral_radius(const WeightedNetwork& net) {
  return spectral_radius(net.z(), net.name().empty() ? "Z" : net.name());
}

double largest_eigenvalue_symmetric(const Matrix& s) {
  if (s.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed");
  return es.eigenvalues().maxCoeff();
}

}  // namespace scenet
