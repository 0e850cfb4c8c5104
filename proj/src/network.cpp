#include <scenet/network.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

namespace scenet {

std::vector<int> agents_of(AgentMask set, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (contains(set, i)) out.push_back(i);
  }
  return out;
}

AgentMask mask_of(std::span<const int> agents) {
  AgentMask m = 0;
  for (int a : agents) m |= AgentMask{1} << a;
  return m;
}

std::string format_agent_set(AgentMask set, int n) {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < n; ++i) {
    if (!contains(set, i)) continue;
    if (!first) s += ',';
    s += std::to_string(i + 1);
    first = false;
  }
  return s + "}";
}

WeightedNetwork::WeightedNetwork(Matrix z, std::optional<WeightBounds> bounds,
                                 std::vector<int> labels, std::string name)
    : z_(std::move(z)), bounds_(bounds), labels_(std::move(labels)), name_(std::move(name)) {
  if (z_.rows() != z_.cols()) {
    throw UsageError("network matrix must be square, got " + std::to_string(z_.rows()) + "x" +
                     std::to_string(z_.cols()));
  }
  const int n = size();
  for (int i = 0; i < n; ++i) {
    if (z_(i, i) != 0.0) {
      throw UsageError("z[" + std::to_string(i) + "][" + std::to_string(i) + "] must be 0");
    }
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(z_(i, j))) {
        throw UsageError("z[" + std::to_string(i) + "][" + std::to_string(j) + "] is not finite");
      }
    }
  }
  if (bounds_) {
    if (bounds_->lo > bounds_->hi) throw UsageError("weight bounds: lo > hi");
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (z_(i, j) < bounds_->lo || z_(i, j) > bounds_->hi) {
          throw UsageError("z[" + std::to_string(i) + "][" + std::to_string(j) +
                           "] outside weight bounds");
        }
      }
    }
  }
  if (labels_.empty()) {
    labels_.resize(n);
    for (int i = 0; i < n; ++i) labels_[i] = i;
  } else if (static_cast<int>(labels_.size()) != n) {
    throw UsageError("label count does not match network size");
  }
}

NeighborSets neighbor_sets(const WeightedNetwork& net, int i) {
  if (i < 0 || i >= net.size()) throw UsageError("agent index out of range");
  NeighborSets out;
  for (int j = 0; j < net.size(); ++j) {
    const double w = net(i, j);
    if (w == 0.0) continue;
    out.all.push_back(j);
    (w > 0.0 ? out.positive : out.negative).push_back(j);
  }
  return out;
}

WeightedNetwork submatrix(const WeightedNetwork& net, std::span<const int> subset) {
  const int m = static_cast<int>(subset.size());
  Matrix z(m, m);
  std::vector<int> labels(m);
  for (int a = 0; a < m; ++a) {
    if (subset[a] < 0 || subset[a] >= net.size()) {
      throw UsageError("submatrix: agent " + std::to_string(subset[a]) + " out of range");
    }
    labels[a] = net.labels()[subset[a]];
    for (int b = 0; b < m; ++b) z(a, b) = net(subset[a], subset[b]);
  }
  return WeightedNetwork(std::move(z), net.bounds(), std::move(labels), net.name());
}

WeightedNetwork submatrix(const WeightedNetwork& net, AgentMask subset) {
  if (net.size() < 64 && (subset >> net.size()) != 0) {
    throw UsageError("submatrix: subset contains agents beyond the network");
  }
  const auto agents = agents_of(subset, net.size());
  return submatrix(net, std::span<const int>(agents));
}

std::string_view to_string(DecompositionKind kind) {
  switch (kind) {
    case DecompositionKind::uniform: return "uniform";
    case DecompositionKind::diagonal: return "diagonal";
    case DecompositionKind::signed_uniform: return "signed";
    case DecompositionKind::general: return "general";
  }
  return "general";
}

Matrix Decomposition::recompose() const { return gamma.asDiagonal() * z0; }

Matrix Decomposition::symmetrized() const {
  const Vector root = gamma.array().sqrt().matrix();
  return root.asDiagonal() * z0 * root.asDiagonal();
}

std::string Obstruction::describe() const {
  std::ostringstream os;
  if (kind == Kind::sign_mismatch) {
    os << "sign mismatch at (" << i + 1 << "," << j + 1 << ")";
  } else {
    os << "inconsistent ratio cycle";
    for (std::size_t k = 0; k < cycle.size(); ++k) os << (k == 0 ? " " : "-") << cycle[k] + 1;
    os << " closed by (" << i + 1 << "," << j + 1 << "): ratio " << edge_ratio << " vs "
       << implied_ratio;
  }
  return os.str();
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

bool ratio_consistent(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

std::vector<int> path_to_root(int v, const std::vector<int>& parent) {
  std::vector<int> path{v};
  while (parent[v] >= 0) {
    v = parent[v];
    path.push_back(v);
  }
  return path;
}

}  // namespace

DecomposeResult symmetrize_decompose(const WeightedNetwork& net) {
  const int n = net.size();
  const Matrix& z = net.z();
  Vector gamma = Vector::Zero(n);
  std::vector<int> parent(n, -1);
  std::vector<bool> seen(n, false);

  for (int root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    gamma(root) = 1.0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v = 0; v < n; ++v) {
        if (v == u || (z(u, v) == 0.0 && z(v, u) == 0.0)) continue;
        if (sign_of(z(u, v)) != sign_of(z(v, u))) {
          Obstruction ob;
          ob.kind = Obstruction::Kind::sign_mismatch;
          ob.i = std::min(u, v);
          ob.j = std::max(u, v);
          return {std::nullopt, ob};
        }
        // z_uv = gamma_u z0_uv and z_vu = gamma_v z0_uv
        const double ratio = z(v, u) / z(u, v);
        if (!seen[v]) {
          seen[v] = true;
          parent[v] = u;
          gamma(v) = gamma(u) * ratio;
          queue.push_back(v);
        } else if (!ratio_consistent(gamma(v), gamma(u) * ratio)) {
          Obstruction ob;
          ob.kind = Obstruction::Kind::inconsistent_cycle;
          ob.i = u;
          ob.j = v;
          ob.edge_ratio = ratio;
          ob.implied_ratio = gamma(v) / gamma(u);
          auto pu = path_to_root(u, parent);
          auto pv = path_to_root(v, parent);
          // trim the common tail to the lowest common ancestor
          while (pu.size() > 1 && pv.size() > 1 && pu[pu.size() - 2] == pv[pv.size() - 2]) {
            pu.pop_back();
            pv.pop_back();
          }
          ob.cycle = pu;
          for (auto it = pv.rbegin() + 1; it != pv.rend(); ++it) ob.cycle.push_back(*it);
          return {std::nullopt, ob};
        }
      }
    }
  }

  Decomposition d;
  d.kind = DecompositionKind::diagonal;
  d.gamma = gamma;
  d.z0 = gamma.cwiseInverse().asDiagonal() * z;
  return {d, std::nullopt};
}

Decomposition classify_structure(const WeightedNetwork& net) {
  const int n = net.size();
  const Matrix& z = net.z();
  std::optional<double> common;
  bool uniform = true;
  bool same_modulus = true;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (z(i, j) == 0.0) continue;
      if (!common) {
        common = z(i, j);
        continue;
      }
      uniform = uniform && z(i, j) == *common;
      same_modulus = same_modulus && std::abs(z(i, j)) == std::abs(*common);
    }
  }

  Decomposition d;
  Matrix pattern = (z.array() != 0.0).cast<double>().matrix();
  if (!common) {
    d.kind = DecompositionKind::uniform;
    d.gamma = Vector::Zero(n);
    d.z0 = Matrix::Zero(n, n);
    return d;
  }
  if (uniform) {
    d.kind = DecompositionKind::uniform;
    d.gamma = Vector::Constant(n, *common);
    d.z0 = pattern;
    return d;
  }
  if (same_modulus) {
    d.kind = DecompositionKind::signed_uniform;
    d.gamma = Vector::Constant(n, std::abs(*common));
    d.z0 = z.array().sign().matrix();
    return d;
  }
  Vector row_weight = Vector::Zero(n);
  bool row_constant = true;
  for (int i = 0; i < n && row_constant; ++i) {
    std::optional<double> w;
    for (int j = 0; j < n; ++j) {
      if (z(i, j) == 0.0) continue;
      if (!w) w = z(i, j);
      row_constant = row_constant && z(i, j) == *w;
    }
    row_weight(i) = w.value_or(0.0);
  }
  if (row_constant) {
    d.kind = DecompositionKind::diagonal;
    d.gamma = row_weight;
    d.z0 = pattern;
    return d;
  }
  d.kind = DecompositionKind::general;
  d.gamma = Vector::Ones(n);
  d.z0 = z;
  return d;
}

std::string_view to_string(Assumption which) {
  switch (which) {
    case Assumption::bounded: return "bounded";
    case Assumption::same_sign: return "same-sign";
    case Assumption::negative: return "negative";
    case Assumption::limited: return "limited";
    case Assumption::symmetrizable: return "symmetrizable";
    case Assumption::symmetrizable_limited: return "symmetrizable-limited";
  }
  return "?";
}

Assumption parse_assumption(std::string_view id) {
  for (Assumption a : kAllAssumptions) {
    if (to_string(a) == id) return a;
  }
  throw UsageError("unknown assumption id '" + std::string(id) + "'");
}

std::string AssumptionReport::witness() const {
  std::ostringstream os;
  os.precision(12);
  if (violating_pair) os << "(" << violating_pair->first + 1 << "," << violating_pair->second + 1 << ")";
  if (value) {
    if (which == Assumption::limited) os << "rho=" << *value;
    else os << "lambda_max=" << *value;
  }
  if (obstruction) os << obstruction->describe();
  if (decomposition && which == Assumption::symmetrizable) {
    os << "gamma=";
    for (Eigen::Index i = 0; i < decomposition->gamma.size(); ++i) {
      os << (i == 0 ? "" : ";") << decomposition->gamma(i);
    }
  }
  return os.str();
}

AssumptionReport check_assumption(const WeightedNetwork& net, Assumption which) {
  const int n = net.size();
  const Matrix& z = net.z();
  AssumptionReport r;
  r.which = which;
  r.holds = true;
  switch (which) {
    case Assumption::bounded: {
      const double cap = n > 0 ? 1.0 / n : 0.0;
      for (int i = 0; i < n && r.holds; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i != j && !(std::abs(z(i, j)) < cap)) {
            r.holds = false;
            r.violating_pair = {i, j};
            break;
          }
        }
      }
      break;
    }
    case Assumption::same_sign: {
      for (int i = 0; i < n && r.holds; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (sign_of(z(i, j)) != sign_of(z(j, i))) {
            r.holds = false;
            r.violating_pair = {i, j};
            break;
          }
        }
      }
      break;
    }
    case Assumption::negative: {
      for (int i = 0; i < n && r.holds; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i != j && z(i, j) > 0.0) {
            r.holds = false;
            r.violating_pair = {i, j};
            break;
          }
        }
      }
      break;
    }
    case Assumption::limited: {
      r.value = spectral_radius(net);
      r.holds = *r.value < 1.0;
      break;
    }
    case Assumption::symmetrizable: {
      auto d = symmetrize_decompose(net);
      r.holds = static_cast<bool>(d);
      r.decomposition = d.decomposition;
      r.obstruction = d.obstruction;
      break;
    }
    case Assumption::symmetrizable_limited: {
      auto d = symmetrize_decompose(net);
      if (!d) {
        r.holds = false;
        r.obstruction = d.obstruction;
        break;
      }
      const Matrix sym = d.decomposition->symmetrized();
      r.value = n > 0 ? largest_eigenvalue_symmetric(sym) : 0.0;
      r.holds = spectral_radius(sym) < 1.0;
      r.decomposition = d.decomposition;
      break;
    }
  }
  return r;
}

WeightedNetwork random_symmetrizable(const RandomNetSpec& spec) {
  if (spec.n < 1) throw UsageError("random network: n must be >= 1");
  if (!(spec.mu > 0.0)) throw UsageError("random network: mu must be > 0");
  if (!(spec.sigma2 >= 0.0)) throw UsageError("random network: sigma2 must be >= 0");
  if (!(spec.k > 0.0 && spec.k < spec.n)) throw UsageError("random network: need 0 < k < n");

  std::mt19937_64 rng(spec.seed);
  const int n = spec.n;
  const double p = n > 1 ? std::min(1.0, spec.k / (n - 1)) : 0.0;
  std::bernoulli_distribution link(p);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (link(rng)) a(i, j) = a(j, i) = 1.0;
    }
  }

  Vector gamma(n);
  if (spec.sigma2 == 0.0) {
    gamma.setConstant(spec.mu);
  } else {
    // log-normal with E = mu, Var = sigma2
    const double s2 = std::log1p(spec.sigma2 / (spec.mu * spec.mu));
    std::lognormal_distribution<double> draw(std::log(spec.mu) - 0.5 * s2, std::sqrt(s2));
    for (int i = 0; i < n; ++i) gamma(i) = draw(rng);
  }
  return WeightedNetwork(gamma.asDiagonal() * a);
}

}  // namespace scenet
