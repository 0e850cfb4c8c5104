#include <scenet/scenario.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scenet {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::array kKnownKeys = {"name",       "mode",     "n",          "alpha",   "z",
                                   "a_max",      "x_bounds", "weight_bounds", "beta", "c",
                                   "y_bounds",   "initial_conjectures", "seed", "tol", "max_iter",
                                   "window",     "epsilon",  "samples"};

[[noreturn]] void reject(const std::string& path, const std::string& what) {
  throw UsageError(path + " " + what);
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) reject(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) reject(path, "must be finite");
  return d;
}

long integer_at(const json& v, const std::string& path, long min_value) {
  if (!v.is_number_integer()) reject(path, "must be an integer");
  const auto i = v.get<long long>();
  if (i < min_value) reject(path, "must be >= " + std::to_string(min_value));
  return static_cast<long>(i);
}

double positive_at(const json& v, const std::string& path) {
  const double d = number_at(v, path);
  if (!(d > 0.0)) reject(path, "must be positive");
  return d;
}

// Scalar broadcast or length-n array.
Vector per_agent(const json& v, const std::string& path, int n) {
  if (v.is_number()) return Vector::Constant(n, number_at(v, path));
  if (!v.is_array()) reject(path, "must be a number or an array of " + std::to_string(n) + " numbers");
  if (static_cast<int>(v.size()) != n) reject(path, "must have length " + std::to_string(n));
  Vector out(n);
  for (int i = 0; i < n; ++i) out(i) = number_at(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return out;
}

std::pair<double, double> pair_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) reject(path, "must be a [lo, hi] pair");
  const double lo = number_at(v[0], path + "[0]");
  const double hi = number_at(v[1], path + "[1]");
  if (!(lo <= hi)) reject(path, "must satisfy lo <= hi");
  return {lo, hi};
}

void pairs_at(const json& v, const std::string& path, int n, Vector& lo, Vector& hi) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) {
    reject(path, "must be an array of " + std::to_string(n) + " [lo, hi] pairs");
  }
  lo.resize(n);
  hi.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto [l, h] = pair_at(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    lo(i) = l;
    hi(i) = h;
  }
}

Matrix matrix_at(const json& v) {
  if (!v.is_array() || v.empty()) reject("z", "must be a non-empty array of rows");
  const int n = static_cast<int>(v.size());
  Matrix z(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string row = "z[" + std::to_string(i) + "]";
    const json& r = v[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<int>(r.size()) != n) reject(row, "must have " + std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j) {
      const std::string cell = row + "[" + std::to_string(j) + "]";
      z(i, j) = number_at(r[static_cast<std::size_t>(j)], cell);
      if (i == j && z(i, j) != 0.0) reject(cell, "must be 0");
    }
  }
  return z;
}

ordered_json vector_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json pairs_json(const Vector& lo, const Vector& hi) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < lo.size(); ++i) a.push_back(ordered_json::array({lo(i), hi(i)}));
  return a;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text, bool strict) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("malformed scenario: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("scenario must be a JSON object");
  if (strict) {
    for (const auto& item : doc.items()) {
      if (std::find(kKnownKeys.begin(), kKnownKeys.end(), item.key()) == kKnownKeys.end()) {
        throw UsageError("unknown key '" + item.key() + "'");
      }
    }
  }

  Scenario s;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) reject("name", "must be a string");
    s.name = doc["name"].get<std::string>();
  }
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) reject("mode", "must be \"local\" or \"global\"");
    const auto m = doc["mode"].get<std::string>();
    if (m == "local") {
      s.mode = ScenarioMode::local;
    } else if (m == "global") {
      s.mode = ScenarioMode::global;
    } else {
      reject("mode", "must be \"local\" or \"global\"");
    }
  }

  if (!doc.contains("z")) throw UsageError("z is required");
  s.z = matrix_at(doc["z"]);
  const int n = s.size();
  if (doc.contains("n") && integer_at(doc["n"], "n", 1) != n) reject("n", "must equal the number of rows of z");

  if (!doc.contains("alpha")) throw UsageError("alpha is required");
  s.alpha = per_agent(doc["alpha"], "alpha", n);

  if (doc.contains("weight_bounds")) {
    const auto [lo, hi] = pair_at(doc["weight_bounds"], "weight_bounds");
    s.weight_bounds = WeightBounds{lo, hi};
  }

  std::optional<Vector> a_max, x_lo, x_hi;
  if (doc.contains("a_max")) {
    a_max = per_agent(doc["a_max"], "a_max", n);
    for (int i = 0; i < n; ++i) {
      if (!((*a_max)(i) > 0.0)) reject("a_max[" + std::to_string(i) + "]", "must be positive");
    }
  }
  if (doc.contains("x_bounds")) {
    Vector lo, hi;
    pairs_at(doc["x_bounds"], "x_bounds", n, lo, hi);
    x_lo = lo;
    x_hi = hi;
  }

  const bool global = s.mode == ScenarioMode::global;
  for (const char* key : {"beta", "c", "y_bounds"}) {
    if (!global && doc.contains(key)) reject(key, "is only valid in global mode");
  }
  if (global) {
    if (!doc.contains("beta")) throw UsageError("beta is required in global mode");
    if (!doc.contains("c")) throw UsageError("c is required in global mode");
    s.beta = number_at(doc["beta"], "beta");
    if (s.beta < 0.0) reject("beta", "must be >= 0");
    s.c = per_agent(doc["c"], "c", n);
  }

  if (doc.contains("seed")) s.seed = static_cast<std::uint64_t>(integer_at(doc["seed"], "seed", 0));
  if (doc.contains("tol")) s.tol = positive_at(doc["tol"], "tol");
  if (doc.contains("max_iter")) s.max_iter = integer_at(doc["max_iter"], "max_iter", 1);
  if (doc.contains("window")) s.window = static_cast<int>(integer_at(doc["window"], "window", 1));
  if (doc.contains("epsilon")) s.epsilon = positive_at(doc["epsilon"], "epsilon");
  if (doc.contains("samples")) s.samples = static_cast<int>(integer_at(doc["samples"], "samples", 0));

  WeightedNetwork net(s.z, s.weight_bounds, {}, s.name);
  const GameSpec game = GameSpec::make(std::move(net), s.alpha, a_max, x_lo, x_hi);
  s.a_max = game.a_max;
  s.x_lo = game.x_lo;
  s.x_hi = game.x_hi;

  if (doc.contains("initial_conjectures")) {
    s.initial_conjectures = per_agent(doc["initial_conjectures"], "initial_conjectures", n);
    for (int i = 0; i < n; ++i) {
      const double v = s.initial_conjectures(i);
      if (v < s.x_lo(i) || v > s.x_hi(i)) reject("initial_conjectures[" + std::to_string(i) + "]", "must lie in x_bounds");
    }
  } else {
    s.initial_conjectures = Vector::Zero(n);
  }

  if (global) {
    std::optional<Vector> y_lo, y_hi;
    if (doc.contains("y_bounds")) {
      Vector lo, hi;
      pairs_at(doc["y_bounds"], "y_bounds", n, lo, hi);
      y_lo = lo;
      y_hi = hi;
    }
    const GlobalGameSpec g = GlobalGameSpec::make(game, s.beta, s.c, y_lo, y_hi);
    s.y_lo = g.y_lo;
    s.y_hi = g.y_hi;
  }
  return s;
}

Scenario load_scenario(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), strict);
}

std::string emit_scenario(const Scenario& s) {
  ordered_json doc;
  if (!s.name.empty()) doc["name"] = s.name;
  doc["mode"] = s.mode == ScenarioMode::global ? "global" : "local";
  doc["n"] = s.size();
  doc["alpha"] = vector_json(s.alpha);
  ordered_json z = ordered_json::array();
  for (Eigen::Index i = 0; i < s.z.rows(); ++i) z.push_back(vector_json(s.z.row(i).transpose()));
  doc["z"] = z;
  if (s.weight_bounds) doc["weight_bounds"] = ordered_json::array({s.weight_bounds->lo, s.weight_bounds->hi});
  doc["a_max"] = vector_json(s.a_max);
  doc["x_bounds"] = pairs_json(s.x_lo, s.x_hi);
  if (s.mode == ScenarioMode::global) {
    doc["beta"] = s.beta;
    doc["c"] = vector_json(s.c);
    doc["y_bounds"] = pairs_json(s.y_lo, s.y_hi);
  }
  doc["initial_conjectures"] = vector_json(s.initial_conjectures);
  doc["seed"] = s.seed;
  doc["tol"] = s.tol;
  doc["max_iter"] = s.max_iter;
  doc["window"] = s.window;
  doc["epsilon"] = s.epsilon;
  doc["samples"] = s.samples;
  return doc.dump(2) + "\n";
}

GameSpec to_game(const Scenario& s) {
  return GameSpec::make(WeightedNetwork(s.z, s.weight_bounds, {}, s.name), s.alpha, s.a_max, s.x_lo, s.x_hi);
}

GlobalGameSpec to_global_game(const Scenario& s) {
  if (s.mode != ScenarioMode::global) throw UsageError("scenario mode must be \"global\" for this command");
  return GlobalGameSpec::make(to_game(s), s.beta, s.c, s.y_lo, s.y_hi);
}

LearningOptions learning_options(const Scenario& s) {
  LearningOptions o;
  o.tol = s.tol;
  o.max_iter = s.max_iter;
  o.window = s.window;
  return o;
}

}  // namespace scenet
