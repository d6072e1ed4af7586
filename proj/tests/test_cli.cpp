#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nambu/config.hpp"
#include "nambu/error.hpp"
#include "nambu/runner.hpp"

using namespace nambu;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "nambu_cli_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_config("experiment = euler-top\n");
  CHECK(c.experiment == Experiment::euler_top);
  CHECK(c.dt == 1e-2);
  CHECK(c.steps == 10000);
  CHECK(c.method == Method::midpoint);
  CHECK(c.xi0 == Vec3(1, 0.1, 0.1));
  CHECK(c.inertia == Vec3(1, 2, 3));
  CHECK(c.out == "euler-top");
  CHECK_FALSE(c.seed.has_value());
}

TEST_CASE("validation errors") {
  CHECK(error_message("experiment = euler-top\ndt = -1\n").find("dt") != std::string::npos);
  CHECK(error_message("experiment = euler-top\nfoo = 3\n").find("'foo'") != std::string::npos);
  CHECK(error_message("experiment = vortex\n").find("seed") != std::string::npos);
  CHECK(error_message("dt = 0.1\n").find("experiment") != std::string::npos);
  CHECK_FALSE(error_message("experiment = euler-top\ndt = 1\ndt = 2\n").empty());
  CHECK_FALSE(error_message("experiment = vortex\nseed = 1\ngrid_n = 12\n").empty());
  CHECK_FALSE(error_message("experiment = vortex\nseed = 1\nkmax = 9\n").empty());
  CHECK_FALSE(error_message("experiment = nls\nseed = 1\ncomponents = 4\n").empty());
  CHECK_FALSE(error_message("experiment = fluid\nseed = 1\nmethod = midpoint\n").empty());
  CHECK_FALSE(error_message("experiment = euler-top\nsteps = x\n").empty());
  CHECK_FALSE(error_message("experiment = euler-top\ninertia = 1,2\n").empty());
  CHECK_FALSE(error_message("experiment = nope\n").empty());
  CHECK_THROWS_AS(parse_config("experiment = vortex\nseed = 1\n", Experiment::nls), ConfigError);
}

TEST_CASE("text and JSON forms agree") {
  const RunConfig a = parse_config("# comment\nexperiment = nls\nseed = 7\nhbar = 0.5\ninertia = 1, 2, 4\n");
  const RunConfig b = parse_config(R"({"experiment": "nls", "seed": 7, "hbar": 0.5, "inertia": [1, 2, 4]})");
  CHECK(format_config(a) == format_config(b));
  CHECK(a.hbar == 0.5);
  CHECK(a.inertia == Vec3(1, 2, 4));
  CHECK(*a.seed == 7);
}

TEST_CASE("format_config round-trips") {
  for (const auto& name : experiment_names()) {
    RunConfig c = default_config(parse_experiment(name));
    if (is_randomized(c.experiment)) c.seed = 42;
    const std::string text = format_config(c);
    CHECK(format_config(parse_config(text)) == text);
  }
}

TEST_CASE("euler-top run writes the trajectory") {
  RunConfig c = parse_config("experiment = euler-top\nsteps = 20\n");
  c.out = scratch("et");
  const RunResult r = run(c);
  CHECK(r.summary.rfind("euler-top ", 0) == 0);
  CHECK(r.summary.find("drift_H1=") != std::string::npos);
  CHECK(r.summary.find("drift_H2=") != std::string::npos);
  const std::string csv = slurp(c.out + ".csv");
  CHECK(csv.rfind("time,xi1,xi2,xi3,H1,H2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
  const auto j = nlohmann::json::parse(slurp(c.out + ".json"));
  CHECK(j["experiment"] == "euler-top");
}

TEST_CASE("bracket-check reports zero residuals") {
  RunConfig c = parse_config("experiment = bracket-check\nseed = 3\nsamples = 20\n");
  c.out = scratch("bc");
  const RunResult r = run(c);
  CHECK(r.summary.find("max_jacobi=0 ") != std::string::npos);
  const std::string csv = slurp(c.out + ".csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",0,0,0") != std::string::npos);
  }
  CHECK(rows == 11);
}

TEST_CASE("reduce-check is deterministic") {
  RunConfig c = parse_config("experiment = reduce-check\nseed = 11\nsamples = 10\nsteps = 10\n");
  c.out = scratch("rc1");
  const RunResult a = run(c);
  const std::string first = slurp(c.out + ".csv");
  c.out = scratch("rc2");
  const RunResult b = run(c);
  CHECK(first == slurp(c.out + ".csv"));
  CHECK(a.summary == b.summary);
  c.seed = 12;
  c.out = scratch("rc3");
  run(c);
  CHECK(first != slurp(c.out + ".csv"));
}

TEST_CASE("error reporting") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(DomainError("x")) == 2);
  CHECK(exit_code_for(ConvergenceError("x", 1.0, 3)) == 3);
  CHECK(exit_code_for(DensityUnderflow("x", 0.0)) == 3);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);
  const auto j = nlohmann::json::parse(error_json(DensityUnderflow("node", 0.0)));
  CHECK(j["error"] == "density_underflow");
  CHECK(j["exit_code"] == 3);
  CHECK(j["message"] == "node");
}
