#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nambu/config.hpp"
#include "nambu/error.hpp"
#include "nambu/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out, seed, dt, steps, grid_n, hbar;
};

nambu::RunConfig resolve(nambu::Experiment e, const Flags& f) {
  nambu::KeyValues pairs;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw nambu::ConfigError(fmt::format("cannot read config '{}'", f.config));
    std::stringstream ss;
    ss << in.rdbuf();
    pairs = nambu::read_key_values(ss.str());
  }
  // flags replace file values
  auto flag = [&pairs](const char* key, const std::optional<std::string>& v) {
    if (!v) return;
    std::erase_if(pairs, [key](const auto& p) { return p.first == key; });
    pairs.emplace_back(key, *v);
  };
  flag("out", f.out);
  flag("seed", f.seed);
  flag("dt", f.dt);
  flag("steps", f.steps);
  flag("grid_n", f.grid_n);
  flag("hbar", f.hbar);
  return nambu::build_config(pairs, e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nambu and Lie-Poisson dynamics experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::optional<nambu::Experiment> chosen;

  for (const auto& name : nambu::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, fmt::format("run the {} experiment", name));
    sub->add_option("--config", flags.config, "key = value or JSON config file");
    sub->add_option("--out", flags.out, "output path prefix");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--dt", flags.dt, "time step");
    sub->add_option("--steps", flags.steps, "number of steps");
    sub->add_option("--grid-n", flags.grid_n, "grid points per axis");
    sub->add_option("--hbar", flags.hbar, "Planck constant");
    sub->callback([&chosen, name] { chosen = nambu::parse_experiment(name); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nambu::error_json(nambu::ConfigError(e.what())) << '\n';
    return 2;
  }

  try {
    const nambu::RunResult result = nambu::run(resolve(*chosen, flags));
    std::cout << result.summary << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << nambu::error_json(e) << '\n';
    return nambu::exit_code_for(e);
  }
}
