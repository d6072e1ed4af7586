#include "nambu/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nambu/error.hpp"

namespace nambu {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(fmt::format("key '{}': '{}' is not a finite number", key, value));
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(fmt::format("key '{}': '{}' is not an integer", key, value));
  return out;
}

int to_int(const std::string& key, const std::string& value) {
  const long long x = to_integer(key, value);
  if (x < -2147483647LL || x > 2147483647LL)
    throw ConfigError(fmt::format("key '{}': {} is out of range", key, value));
  return static_cast<int>(x);
}

Vec3 to_vec3(const std::string& key, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3)
    throw ConfigError(fmt::format("key '{}': expected three comma-separated numbers, got '{}'", key, value));
  return Vec3(to_double(key, parts[0]), to_double(key, parts[1]), to_double(key, parts[2]));
}

std::string g17(double x) { return fmt::format("{:.17g}", x); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool is_field(Experiment e) {
  return e == Experiment::vortex || e == Experiment::fluid || e == Experiment::clebsch_fluid ||
         e == Experiment::nls || e == Experiment::correspondence;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"euler-top", "bracket-check", "reduce-check", "vortex",
                                              "fluid",     "clebsch-fluid", "nls",          "correspondence"};
  return names;
}

std::string to_string(Experiment e) { return experiment_names()[static_cast<std::size_t>(e)]; }

Experiment parse_experiment(std::string_view name) {
  const auto& names = experiment_names();
  const auto it = std::find(names.begin(), names.end(), trim(name));
  if (it == names.end()) throw ConfigError(fmt::format("unknown experiment '{}'", name));
  return static_cast<Experiment>(it - names.begin());
}

bool is_randomized(Experiment e) { return e != Experiment::euler_top; }

RunConfig default_config(Experiment e) {
  RunConfig c;
  c.experiment = e;
  c.out = to_string(e);
  switch (e) {
    case Experiment::euler_top:
      c.dt = 1e-2;
      c.steps = 10000;
      c.method = Method::midpoint;
      break;
    case Experiment::bracket_check:
      c.samples = 100;
      break;
    case Experiment::reduce_check:
      c.samples = 100;
      c.dt = 1e-3;
      c.steps = 1000;
      c.method = Method::rk4;
      break;
    case Experiment::vortex:
      c.steps = 100;
      c.method = Method::rk4;
      c.amplitude = 1.0;
      break;
    case Experiment::fluid:
      c.dt = 1e-2;
      c.steps = 100;
      c.method = Method::rk4;
      c.amplitude = 0.1;
      break;
    case Experiment::clebsch_fluid:
      c.dt = 5e-3;
      c.steps = 50;
      c.method = Method::rk4;
      c.amplitude = 0.02;
      c.kmax = 1;
      break;
    case Experiment::nls:
      c.dt = 1e-3;
      c.steps = 100;
      c.method = Method::rk4;
      c.amplitude = 0.2;
      c.kmax = 1;
      break;
    case Experiment::correspondence:
      c.method = Method::rk4;
      c.amplitude = 0.2;
      c.kmax = 1;
      break;
  }
  return c;
}

KeyValues read_key_values(std::string_view text) {
  KeyValues out;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!j.is_object()) throw ConfigError("JSON config must be an object");
    for (const auto& [key, value] : j.items()) {
      std::string v;
      if (value.is_string()) {
        v = value.get<std::string>();
      } else if (value.is_number_integer()) {
        v = std::to_string(value.get<long long>());
      } else if (value.is_number()) {
        v = g17(value.get<double>());
      } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (!value[i].is_number()) throw ConfigError(fmt::format("key '{}': array entries must be numbers", key));
          v += (i ? "," : "") + g17(value[i].get<double>());
        }
      } else {
        throw ConfigError(fmt::format("key '{}': unsupported JSON value", key));
      }
      out.emplace_back(key, v);
    }
    return out;
  }

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", lineno));
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno));
    out.emplace_back(key, trim(std::string_view(t).substr(eq + 1)));
  }
  return out;
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    if (parse_experiment(value) != c.experiment)
      throw ConfigError(fmt::format("experiment '{}' conflicts with '{}'", value, to_string(c.experiment)));
  } else if (key == "out") {
    require(!trim(value).empty(), "key 'out': empty output prefix");
    c.out = trim(value);
  } else if (key == "seed") {
    const long long s = to_integer(key, value);
    require(s >= 0, fmt::format("key 'seed': {} is negative", value));
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "dt") {
    c.dt = to_double(key, value);
    c.dt_set = true;
  } else if (key == "steps") {
    c.steps = to_int(key, value);
  } else if (key == "method") {
    c.method = parse_method(trim(value));
  } else if (key == "tol") {
    c.tol = to_double(key, value);
  } else if (key == "max_iter") {
    c.max_iter = to_int(key, value);
  } else if (key == "inertia") {
    c.inertia = to_vec3(key, value);
  } else if (key == "xi0") {
    c.xi0 = to_vec3(key, value);
  } else if (key == "samples") {
    c.samples = to_int(key, value);
  } else if (key == "grid_n") {
    c.grid_n = to_int(key, value);
  } else if (key == "cfl") {
    c.cfl = to_double(key, value);
  } else if (key == "kmax") {
    c.kmax = to_int(key, value);
  } else if (key == "amplitude") {
    c.amplitude = to_double(key, value);
  } else if (key == "sound_speed") {
    c.sound_speed = to_double(key, value);
  } else if (key == "hbar") {
    c.hbar = to_double(key, value);
  } else if (key == "coupling") {
    c.coupling = to_double(key, value);
  } else if (key == "components") {
    c.components = to_int(key, value);
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

void validate(const RunConfig& c) {
  if (is_randomized(c.experiment) && !c.seed)
    throw ConfigError(fmt::format("missing required key 'seed' for experiment {}", to_string(c.experiment)));
  require(c.dt > 0.0, fmt::format("dt must be positive, got {}", c.dt));
  require(c.steps >= 1 && c.steps <= 10000000, fmt::format("steps must be in [1, 1e7], got {}", c.steps));
  require(c.tol > 0.0 && c.tol < 1.0, fmt::format("tol must be in (0, 1), got {}", c.tol));
  require(c.max_iter >= 1 && c.max_iter <= 10000, fmt::format("max_iter must be in [1, 10000], got {}", c.max_iter));
  require((c.inertia.array() > 0.0).all(), "inertia entries must be positive");
  require(c.samples >= 1 && c.samples <= 1000000, fmt::format("samples must be in [1, 1e6], got {}", c.samples));
  require(c.grid_n >= 8 && c.grid_n <= 256 && (c.grid_n & (c.grid_n - 1)) == 0,
          fmt::format("grid_n must be a power of two in [8, 256], got {}", c.grid_n));
  require(c.cfl > 0.0 && c.cfl <= 1.0, fmt::format("cfl must be in (0, 1], got {}", c.cfl));
  require(c.kmax >= 1 && 3 * c.kmax <= c.grid_n, fmt::format("kmax must be in [1, grid_n / 3], got {}", c.kmax));
  require(c.amplitude > 0.0 && c.amplitude <= 10.0, fmt::format("amplitude must be in (0, 10], got {}", c.amplitude));
  require(c.sound_speed > 0.0, fmt::format("sound_speed must be positive, got {}", c.sound_speed));
  require(c.hbar > 0.0, fmt::format("hbar must be positive, got {}", c.hbar));
  require(c.components >= 1 && c.components <= 3, fmt::format("components must be 1, 2 or 3, got {}", c.components));
  if (is_field(c.experiment))
    require(c.method == Method::rk4, "field experiments integrate with rk4 only");
}

RunConfig build_config(const KeyValues& pairs, std::optional<Experiment> fixed) {
  std::optional<Experiment> exp = fixed;
  for (const auto& [k, v] : pairs)
    if (k == "experiment") {
      const Experiment e = parse_experiment(v);
      if (exp && *exp != e)
        throw ConfigError(fmt::format("experiment '{}' conflicts with '{}'", v, to_string(*exp)));
      exp = e;
    }
  if (!exp) throw ConfigError("missing required key 'experiment'");
  RunConfig c = default_config(*exp);
  for (const auto& [k, v] : pairs) {
    if (std::count_if(pairs.begin(), pairs.end(), [&](const auto& p) { return p.first == k; }) > 1)
      throw ConfigError(fmt::format("duplicate key '{}'", k));
    set_key(c, k, v);
  }
  validate(c);
  return c;
}

RunConfig parse_config(std::string_view text, std::optional<Experiment> fixed) {
  return build_config(read_key_values(text), fixed);
}

RunConfig load_config(const std::string& path, std::optional<Experiment> fixed) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fixed);
}

std::string format_config(const RunConfig& c) {
  std::string s;
  auto line = [&](std::string_view k, const std::string& v) { s += fmt::format("{} = {}\n", k, v); };
  auto vec = [](const Vec3& v) { return fmt::format("{},{},{}", g17(v[0]), g17(v[1]), g17(v[2])); };
  line("experiment", to_string(c.experiment));
  line("out", c.out);
  if (c.seed) line("seed", std::to_string(*c.seed));
  if (c.dt_set || c.experiment != Experiment::vortex) line("dt", g17(c.dt));
  line("steps", std::to_string(c.steps));
  line("method", to_string(c.method));
  line("tol", g17(c.tol));
  line("max_iter", std::to_string(c.max_iter));
  line("inertia", vec(c.inertia));
  line("xi0", vec(c.xi0));
  line("samples", std::to_string(c.samples));
  line("grid_n", std::to_string(c.grid_n));
  line("cfl", g17(c.cfl));
  line("kmax", std::to_string(c.kmax));
  line("amplitude", g17(c.amplitude));
  line("sound_speed", g17(c.sound_speed));
  line("hbar", g17(c.hbar));
  line("coupling", g17(c.coupling));
  line("components", std::to_string(c.components));
  return s;
}

}  // namespace nambu
