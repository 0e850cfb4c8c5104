#ifndef SCENET_TESTS_SUPPORT_HPP
#define SCENET_TESTS_SUPPORT_HPP

// Independent oracles and random generators for the test suites. Nothing in
// here calls the library's solvers; the oracles use plain loops so that a
// bug in the Eigen-based paths cannot hide behind itself.

#include <scenet/game.hpp>
#include <scenet/global_ext.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

using scenet::GameSpec;
using scenet::Matrix;
using scenet::Vector;
using scenet::WeightedNetwork;

// Four-agent directed test network: agent i is affected by agent j.
inline Matrix four_agent(double gamma) {
  Matrix z = Matrix::Zero(4, 4);
  for (auto [i, j] : {std::pair{0, 3}, {1, 0}, {1, 2}, {1, 3}, {3, 0}, {3, 2}}) z(i, j) = gamma;
  return z;
}

inline Matrix four_agent_mixed() {
  Matrix z = four_agent(0.2);
  z(2, 1) = -0.2;
  z(2, 3) = -0.2;
  return z;
}

inline Matrix line3(double gamma) {
  Matrix z = Matrix::Zero(3, 3);
  z(0, 1) = z(1, 0) = z(1, 2) = z(2, 1) = gamma;
  return z;
}

inline Matrix complete(int n, double gamma) {
  Matrix z = Matrix::Constant(n, n, gamma);
  z.diagonal().setZero();
  return z;
}

inline GameSpec game(const Matrix& z, double alpha) {
  return GameSpec::make(WeightedNetwork(z), Vector::Constant(z.rows(), alpha));
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

inline double sup_diff(const Vector& a, const Vector& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------- oracles

// Gaussian elimination with partial pivoting.
inline Vector gauss_solve(Matrix a, Vector b) {
  const int n = static_cast<int>(a.rows());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    if (std::abs(a(piv, col)) < 1e-14) throw std::runtime_error("gauss_solve: singular");
    a.row(col).swap(a.row(piv));
    std::swap(b(col), b(piv));
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b(r) -= f * b(col);
    }
  }
  Vector x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b(r);
    for (int c = r + 1; c < n; ++c) s -= a(r, c) * x(c);
    x(r) = s / a(r, r);
  }
  return x;
}

// Interior equilibrium of the game restricted to `agents`, zeros elsewhere.
inline Vector restricted_solve(const Matrix& z, const Vector& alpha, const std::vector<int>& agents) {
  const int m = static_cast<int>(agents.size());
  Matrix a(m, m);
  Vector b(m);
  for (int r = 0; r < m; ++r) {
    b(r) = alpha(agents[r]);
    for (int c = 0; c < m; ++c) a(r, c) = (r == c ? 1.0 : 0.0) - z(agents[r], agents[c]);
  }
  const Vector sol = gauss_solve(a, b);
  Vector full = Vector::Zero(z.rows());
  for (int r = 0; r < m; ++r) full(agents[r]) = sol(r);
  return full;
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier:
// det(lambda I - A) = lambda^n + c[1] lambda^{n-1} + ... + c[n].
inline std::vector<double> char_poly(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    Matrix next(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += a(i, l) * m(l, j);
        next(i, j) = s + (i == j ? c[static_cast<std::size_t>(k) - 1] : 0.0);
      }
    }
    m = next;
    double tr = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < n; ++l) tr += a(i, l) * m(l, i);
    }
    c[static_cast<std::size_t>(k)] = -tr / k;
  }
  return c;
}

// All roots of the monic polynomial by Durand-Kerner iteration.
inline std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<std::complex<double>> z(static_cast<std::size_t>(n));
  const std::complex<double> seed(0.4, 0.9);
  double bound = 1.0;
  for (int k = 1; k <= n; ++k) bound = std::max(bound, 1.0 + std::abs(c[static_cast<std::size_t>(k)]));
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = bound * std::pow(seed, k) * 0.5;
  auto eval = [&](std::complex<double> x) {
    std::complex<double> v = 1.0;
    for (int k = 1; k <= n; ++k) v = v * x + c[static_cast<std::size_t>(k)];
    return v;
  };
  for (int it = 0; it < 5000; ++it) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      std::complex<double> denom = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) denom *= z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
      }
      if (std::abs(denom) < 1e-300) denom = 1e-300;
      const auto step = eval(z[static_cast<std::size_t>(i)]) / denom;
      z[static_cast<std::size_t>(i)] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-15) break;
  }
  return z;
}

inline double spectral_radius_oracle(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  double r = 0.0;
  for (auto root : poly_roots(char_poly(a))) r = std::max(r, std::abs(root));
  return r;
}

// Near fixed points of the best-reply map found by a grid over the first
// n-1 agents, with the last agent's best reply computed exactly. Hits are
// grouped into clusters of adjacent grid cells; one representative each.
inline std::vector<Vector> grid_ne_oracle(const GameSpec& spec, double step, double upper) {
  const int n = spec.size();
  const int cells = static_cast<int>(std::lround(upper / step)) + 1;
  const Matrix& z = spec.net.z();
  double row_abs = 0.0;
  for (int i = 0; i < n; ++i) row_abs = std::max(row_abs, z.row(i).cwiseAbs().sum());
  const double slack = step * (1.0 + row_abs);

  struct Hit {
    std::vector<int> idx;
    Vector a;
    double residual;
  };
  std::vector<Hit> hits;
  std::vector<int> idx(static_cast<std::size_t>(std::max(n - 1, 0)), 0);
  Vector a(n);
  while (true) {
    for (int i = 0; i + 1 < n; ++i) a(i) = idx[static_cast<std::size_t>(i)] * step;
    double x_last = 0.0;
    for (int j = 0; j + 1 < n; ++j) x_last += z(n - 1, j) * a(j);
    a(n - 1) = std::clamp(spec.alpha(n - 1) + x_last, 0.0, spec.a_max(n - 1));
    double res = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      double x = 0.0;
      for (int j = 0; j < n; ++j) x += z(i, j) * a(j);
      res = std::max(res, std::abs(a(i) - std::clamp(spec.alpha(i) + x, 0.0, spec.a_max(i))));
    }
    if (res <= slack) hits.push_back({idx, a, res});
    int d = n - 2;
    while (d >= 0 && idx[static_cast<std::size_t>(d)] == cells - 1) idx[static_cast<std::size_t>(d--)] = 0;
    if (d < 0) break;
    ++idx[static_cast<std::size_t>(d)];
  }

  std::vector<int> parent(hits.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
  for (std::size_t p = 0; p < hits.size(); ++p) {
    for (std::size_t q = p + 1; q < hits.size(); ++q) {
      bool adjacent = true;
      for (std::size_t d = 0; d < hits[p].idx.size(); ++d) {
        adjacent = adjacent && std::abs(hits[p].idx[d] - hits[q].idx[d]) <= 1;
      }
      if (adjacent) parent[find(static_cast<int>(p))] = find(static_cast<int>(q));
    }
  }
  std::vector<Vector> reps;
  std::vector<int> roots;
  std::vector<double> best;
  for (std::size_t p = 0; p < hits.size(); ++p) {
    const int r = find(static_cast<int>(p));
    auto it = std::find(roots.begin(), roots.end(), r);
    if (it == roots.end()) {
      roots.push_back(r);
      reps.push_back(hits[p].a);
      best.push_back(hits[p].residual);
    } else {
      const auto k = static_cast<std::size_t>(it - roots.begin());
      if (hits[p].residual < best[k]) {
        best[k] = hits[p].residual;
        reps[k] = hits[p].a;
      }
    }
  }
  return reps;
}

// Newton's method with a finite-difference Jacobian on H(a) = 0.
inline Vector newton_oracle(const std::function<Vector(const Vector&)>& h, Vector a, int iters = 100) {
  const int n = static_cast<int>(a.size());
  for (int it = 0; it < iters; ++it) {
    const Vector f = h(a);
    if (f.cwiseAbs().maxCoeff() < 1e-14) break;
    Matrix j(n, n);
    for (int c = 0; c < n; ++c) {
      Vector ap = a;
      const double d = 1e-7 * std::max(1.0, std::abs(a(c)));
      ap(c) += d;
      j.col(c) = (h(ap) - f) / d;
    }
    a -= gauss_solve(j, f);
  }
  return a;
}

// H_i written out independently of the library.
inline Vector global_residual_oracle(const Matrix& z, double alpha, double beta, const Vector& c, const Vector& a) {
  const int n = static_cast<int>(a.size());
  Vector h(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += a(i);
  for (int i = 0; i < n; ++i) {
    double x = 0.0;
    for (int j = 0; j < n; ++j) x += z(i, j) * a(j);
    const double y = beta * (total - a(i));
    h(i) = alpha + c(i) * (a(i) * x + y) / (1.0 + c(i) * a(i)) - a(i);
  }
  return h;
}

// ------------------------------------------------------------- generators

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  bool coin(double p) { return std::bernoulli_distribution(p)(eng); }
};

// Sparse-ish matrix with entries uniform in [-scale, scale], zero diagonal.
inline Matrix random_matrix(Rng& rng, int n, double scale, double density = 0.7) {
  Matrix z = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && rng.coin(density)) z(i, j) = rng.uniform(-scale, scale);
    }
  }
  return z;
}

inline GameSpec random_game(Rng& rng, int n, double scale) {
  Vector alpha(n);
  for (int i = 0; i < n; ++i) alpha(i) = rng.uniform(-0.05, 0.3);
  return GameSpec::make(WeightedNetwork(random_matrix(rng, n, scale)), alpha);
}

inline double radius(const Matrix& z) {
  if (z.rows() == 0) return 0.0;
  return Eigen::EigenSolver<Matrix>(z, false).eigenvalues().cwiseAbs().maxCoeff();
}

// |z_ij| < 1/n.
inline Matrix random_bounded(Rng& rng, int n) {
  Matrix z = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) z(i, j) = rng.uniform(-1.0, 1.0) * 0.999 / n;
    }
  }
  return z;
}

// All entries <= 0, scaled to a random spectral radius in (0, 1).
inline Matrix random_negative_limited(Rng& rng, int n) {
  Matrix z = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) z(i, j) = -rng.uniform(0.0, 1.0);
    }
  }
  const double r = radius(z);
  return r > 0 ? Matrix(z * (rng.uniform(0.05, 0.99) / r)) : z;
}

// Z = Gamma Z0 with Z0 symmetric, scaled so the spectral radius is below 1.
inline Matrix random_symmetrizable_limited(Rng& rng, int n) {
  Matrix z0 = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) z0(i, j) = z0(j, i) = rng.uniform(-1.0, 1.0);
  }
  Vector gamma(n);
  for (int i = 0; i < n; ++i) gamma(i) = rng.uniform(0.5, 2.0);
  Matrix z = gamma.asDiagonal() * z0;
  const double r = radius(z);
  return r > 0 ? Matrix(z * (rng.uniform(0.05, 0.99) / r)) : z;
}

// Nonnegative network with row sums in (lo, hi).
inline Matrix random_nonnegative(Rng& rng, int n, double row_lo, double row_hi) {
  Matrix z = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i != j) s += z(i, j) = rng.uniform(0.1, 1.0);
    }
    z.row(i) *= rng.uniform(row_lo, row_hi) / s;
  }
  return z;
}

// ------------------------------------------------------------------- CSV

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace testing

#endif  // SCENET_TESTS_SUPPORT_HPP
