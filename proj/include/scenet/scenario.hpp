#ifndef SCENET_SCENARIO_HPP
#define SCENET_SCENARIO_HPP

#include <scenet/global_ext.hpp>
#include <scenet/learning.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace scenet {

enum class ScenarioMode { local, global };

/// A scenario document with every default filled in.
struct Scenario {
  std::string name;
  ScenarioMode mode = ScenarioMode::local;
  Vector alpha;
  Matrix z;
  std::optional<WeightBounds> weight_bounds;
  Vector a_max;
  Vector x_lo;
  Vector x_hi;
  double beta = 0.0;
  Vector c;
  Vector y_lo;
  Vector y_hi;
  Vector initial_conjectures;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  long max_iter = 100000;
  int window = 3;
  double epsilon = 1e-3;
  int samples = 100;

  int size() const noexcept { return static_cast<int>(z.rows()); }
};

/// Parses and validates a JSON scenario. Errors name the offending field,
/// e.g. "z[2][2] must be 0". Strict mode rejects unknown keys.
Scenario parse_scenario(std::string_view json_text, bool strict = true);
Scenario load_scenario(const std::string& path, bool strict = true);

/// Normalized JSON (two-space indent, trailing newline). Parsing the output
/// and emitting again yields identical bytes.
std::string emit_scenario(const Scenario& s);

GameSpec to_game(const Scenario& s);
/// Throws UsageError unless the scenario is global.
GlobalGameSpec to_global_game(const Scenario& s);

LearningOptions learning_options(const Scenario& s);

}  // namespace scenet

#endif  // SCENET_SCENARIO_HPP
