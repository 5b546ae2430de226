// Command-line front end: `fbl run <config.json>` and `fbl report <run_dir>`.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fbl/error.hpp"
#include "fbl/experiment.hpp"

namespace {

int run_command(const std::string& config_path, const std::optional<std::string>& out,
                const std::optional<std::uint64_t>& seed, int ensemble) {
  fbl::ExperimentConfig config;
  try {
    config = fbl::load_config(config_path);
  } catch (const fbl::ConfigFileError& e) {
    std::cerr << "fbl: " << e.what() << '\n';
    return fbl::exit_unreadable;
  } catch (const fbl::Error& e) {
    std::cerr << "fbl: invalid configuration: " << e.what() << '\n';
    return fbl::exit_invalid;
  }
  if (seed) config.initial.seed = *seed;
  std::filesystem::path dir = out ? *out : config.output;
  if (dir.empty()) dir = std::filesystem::path("runs") / fbl::to_string(config.kind);
  config.output = dir.string();

  const fbl::RunOutcome outcome = ensemble > 0
                                      ? fbl::run_ensemble(config, dir, ensemble, fbl::worker_limit())
                                      : fbl::run_experiment(config, dir);
  if (outcome.exit_code != fbl::exit_ok) std::cerr << "fbl: " << outcome.message << '\n';
  else std::cout << dir.string() << '\n';
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral laboratory for the fractal Burgers equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int ensemble = 0;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Seed for random initial data");
  run->add_option("--ensemble", ensemble, "Run K members with seeds seed..seed+K-1")->check(CLI::PositiveNumber);

  std::string run_dir;
  auto* report = app.add_subcommand("report", "Summarize a finished run directory");
  report->add_option("run_dir", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fbl::exit_invalid;
  }

  try {
    if (*run) return run_command(config_path, out, seed, ensemble);
    const fbl::RunOutcome outcome = fbl::emit_report(run_dir);
    if (outcome.exit_code != fbl::exit_ok) std::cerr << "fbl: " << outcome.message << '\n';
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "fbl: " << e.what() << '\n';
    return fbl::exit_failure;
  }
}
