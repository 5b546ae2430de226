#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbl/littlewood_paley.hpp"
#include "fbl/profiles.hpp"
#include "fbl/solver.hpp"

namespace fbl {

enum class ExperimentKind {
  solve,
  picard,
  lp_analyze,
  modulus_check,
  commutator_test,
  apriori_scan,
  negativity_scan,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_unreadable = 2,
  exit_invalid = 3,
  exit_blowup = 4,
};

struct XiGrid {
  double min = 1e-3;
  double max = 1e6;
  int count = 100;

  /// count log-spaced points from min to max.
  std::vector<double> points() const;
};

struct AnalysisSettings {
  std::vector<BesovSpec> besov = {BesovSpec{0.5, 2.0, 1.0}};
  double xi0 = 1e10;
  std::vector<double> betas = {1.0};
  double tol = 1e-8;
  XiGrid xi_grid;
  int picard_iterations = 5;
  /// Dyadic index for commutator-test; unset scans every block.
  std::optional<int> commutator_q;
  double rho = std::numeric_limits<double>::infinity();
  double rho1 = 1.0;
  double p1 = 2.0;
  double t1_fraction = 0.01;
  /// Advecting field for apriori-scan and commutator-test.
  ProfileSpec velocity{"random-smooth", 0.5, 1, 0.3, 20.0, 8};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::solve;
  SolverConfig solver;
  ProfileSpec initial;
  AnalysisSettings analysis;
  std::string output;
};

/// Builds a config from JSON, filling defaults.  Type or range problems
/// raise ParameterError whose message starts with the dotted field name,
/// e.g. "params.alpha: ...".
ExperimentConfig parse_config(const nlohmann::json& j);

/// Every field, defaults included.
nlohmann::json to_json(const ExperimentConfig& config);

/// Reads and parses a config file.  Unreadable or non-JSON files raise
/// ConfigFileError.
class ConfigFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOutcome {
  int exit_code = exit_ok;
  std::string message;
};

/// Runs one experiment into `out_dir` (created if needed) and writes the
/// manifest last.  Blow-up keeps the partial artifacts and returns exit_blowup.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// `members` independent runs in out_dir/member_XXX with seeds seed + i,
/// at most `workers` at a time.  The result carries the first failing
/// member's exit code.
RunOutcome run_ensemble(const ExperimentConfig& config, const std::filesystem::path& out_dir, int members,
                        int workers);

/// Writes summary.json and series/*.csv for a finished run directory.
/// Missing or corrupt manifests give exit_unreadable.
RunOutcome emit_report(const std::filesystem::path& run_dir);

/// Worker cap: FBL_THREADS if set and positive, else the hardware count.
int worker_limit();

}  // namespace fbl
