// cvent: scenario sweeps, figure datasets and the Fock-oracle cross-check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cvent/oracle_check.hpp"
#include "cvent/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFlagged = 3;

namespace runner = cvent::runner;

int simulate(const std::string& config_path, const std::string& out_path, bool strict) {
  const runner::ScenarioConfig config = runner::load_config(config_path);
  const auto rows = runner::run_scenario(config);
  if (out_path.empty()) {
    runner::write_csv(std::cout, config, rows, config.label);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      fmt::print(stderr, "error: cannot write '{}'\n", out_path);
      return kExitFailure;
    }
    runner::write_csv(out, config, rows, config.label);
  }
  std::size_t flagged = 0;
  for (const auto& r : rows) flagged += r.flagged() ? 1 : 0;
  if (flagged > 0) {
    fmt::print(stderr, "{}: {} of {} rows carry a validity flag\n", strict ? "error" : "warning",
               flagged, rows.size());
    if (strict) return kExitFlagged;
  }
  return kExitOk;
}

int figure(const std::string& preset, const std::string& out_dir) {
  const auto curves = runner::figure_preset(preset);
  std::filesystem::create_directories(out_dir);
  for (const auto& curve : curves) {
    const auto path = std::filesystem::path(out_dir) / fmt::format("{}_{}.csv", preset, curve.name);
    std::ofstream out(path);
    if (!out) {
      fmt::print(stderr, "error: cannot write '{}'\n", path.string());
      return kExitFailure;
    }
    runner::write_csv(out, curve.config, curve.rows, curve.description);
    fmt::print("{}\n", path.string());
  }
  return kExitOk;
}

int oracle_check(double max_strength, std::size_t n_max) {
  runner::OracleCheckOptions options;
  options.max_strength = max_strength;
  options.n_max = n_max;
  const auto report = runner::run_oracle_check(options);
  fmt::print("{}", runner::format_report(report, options));
  return report.passed() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-variable entanglement measurement simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  bool strict = false;
  auto* sim = app.add_subcommand("simulate", "Run a scenario file and emit CSV");
  sim->add_option("config-file", config_path, "Scenario file")->required();
  sim->add_option("--out", out_path, "Output CSV path (default: stdout)");
  sim->add_flag("--strict", strict, "Exit with status 3 when any row carries a validity flag");

  std::string preset;
  std::string out_dir = ".";
  auto* fig = app.add_subcommand("figure", "Emit the CSV curves of a figure preset");
  fig->add_option("preset-name", preset, "Preset name")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(runner::figure_preset_names().begin(),
                                                     runner::figure_preset_names().end())));
  fig->add_option("--out-dir", out_dir, "Directory for the curve files");

  double max_strength = 0.8;
  std::size_t n_max = 40;
  auto* oc = app.add_subcommand("oracle-check", "Compare covariance results with the Fock oracle");
  oc->add_option("--max-strength", max_strength, "Largest squeeze strength used")
      ->check(CLI::PositiveNumber);
  oc->add_option("--nmax", n_max, "Fock cutoff per mode")->check(CLI::Range(2, 200));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sim) return simulate(config_path, out_path, strict);
    if (*fig) return figure(preset, out_dir);
    return oracle_check(max_strength, n_max);
  } catch (const runner::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFailure;
  }
}
