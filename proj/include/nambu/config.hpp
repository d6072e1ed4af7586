#pragma once

// Run configuration for the command-line runner. Plain key = value text or
// an equivalent flat JSON object; unknown keys and out-of-range values are
// errors.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nambu/algebra3.hpp"
#include "nambu/integrate.hpp"

namespace nambu {

enum class Experiment {
  euler_top,
  bracket_check,
  reduce_check,
  vortex,
  fluid,
  clebsch_fluid,
  nls,
  correspondence,
};

std::string to_string(Experiment e);
Experiment parse_experiment(std::string_view name);
const std::vector<std::string>& experiment_names();
/// Experiments that draw random data and therefore need a seed.
bool is_randomized(Experiment e);

struct RunConfig {
  Experiment experiment = Experiment::euler_top;
  std::string out;
  std::optional<std::uint64_t> seed;

  double dt = 1e-2;
  bool dt_set = false;  ///< vortex derives dt from cfl unless dt is given
  int steps = 100;
  Method method = Method::midpoint;
  double tol = 1e-13;
  int max_iter = 50;

  Vec3 inertia{1.0, 2.0, 3.0};
  Vec3 xi0{1.0, 0.1, 0.1};
  int samples = 100;

  int grid_n = 16;
  double cfl = 0.05;
  int kmax = 3;
  double amplitude = 0.5;
  double sound_speed = 1.0;

  double hbar = 1.0;
  double coupling = 0.5;
  int components = 2;
};

/// Defaults for one experiment, before any key is applied.
RunConfig default_config(Experiment e);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Splits key = value text or a flat JSON object into ordered pairs.
KeyValues read_key_values(std::string_view text);

/// Builds a config from pairs. `experiment` must come either from the pairs
/// or from `fixed` (the subcommand); a conflict is an error.
RunConfig build_config(const KeyValues& pairs, std::optional<Experiment> fixed = std::nullopt);

RunConfig parse_config(std::string_view text, std::optional<Experiment> fixed = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<Experiment> fixed = std::nullopt);

/// Applies one key; throws ConfigError for unknown keys or bad values.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Range checks and required keys.
void validate(const RunConfig& cfg);

/// key = value rendering of every field, in a fixed order.
std::string format_config(const RunConfig& cfg);

}  // namespace nambu
