#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fbl/littlewood_paley.hpp"
#include "fbl/spectral.hpp"

namespace fbl {

enum class Integrator { exponential_rk2, exponential_rk4 };

int integrator_order(Integrator integrator);
std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

struct SolverConfig {
  DomainSpec domain{2.0 * 3.14159265358979323846, 256};
  EvolutionParams params;
  double t_end = 1.0;
  /// Upper bound on the step; unset means CFL-only.
  std::optional<double> dt;
  double cfl = 0.4;
  int snapshot_stride = 1;
  Integrator integrator = Integrator::exponential_rk4;

  void validate() const;
};

/// A time-dependent field, e.g. the advecting velocity or the forcing.
using TimeField = std::function<GridFunction(double)>;

TimeField constant_field(GridFunction value);

/// Piecewise-linear interpolation in time between stored snapshots, held
/// constant outside the stored range.
TimeField interpolated_field(std::vector<Snapshot> snapshots);

struct TDProblem {
  GridFunction u0;
  TimeField velocity;
  TimeField forcing;  ///< empty means f = 0
};

/// One row of per-step diagnostics.
struct DiagnosticRow {
  double t = 0.0;
  double sup_norm = 0.0;
  double grad_sup = 0.0;
  double l2_norm = 0.0;
  double mean = 0.0;
  /// Trapezoidal integral of ||d_x u||_inf from 0 to t.
  double blowup_cumulative = 0.0;
  /// Step that produced this row; 0 for the initial row.
  double dt = 0.0;
};

enum class RunStatus { completed, blowup };

struct RunRecord {
  SolverConfig config;
  RunStatus status = RunStatus::completed;
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticRow> diagnostics;
  std::vector<std::string> warnings;
};

/// min(config.dt, cfl dx / max(||u||_inf, 1e-12)).
double cfl_timestep(const GridFunction& u, const SolverConfig& config);

/// One exponential-integrator step of d_t u + v d_x u + nu Lambda^alpha u = f
/// from time t.  The dissipation is integrated exactly; -v d_x u + f goes
/// through the Lawson Runge-Kutta rule with 2/3-dealiased products.
GridFunction step_td(const GridFunction& u, const TimeField& velocity, const TimeField& forcing,
                     double t, const EvolutionParams& params, double dt, Integrator integrator);

/// Same step with the velocity and forcing frozen over the step.
GridFunction step_td(const GridFunction& u, const GridFunction& velocity, const GridFunction& forcing,
                     const EvolutionParams& params, double dt, Integrator integrator);

/// One step of d_t u + u d_x u + nu Lambda^alpha u = 0.
GridFunction step_burgers(const GridFunction& u, const EvolutionParams& params, double dt,
                          Integrator integrator);

/// Integrates the transport-diffusion problem to t_end.  The step follows the
/// CFL rule on ||v(t)||_inf.  A non-finite state stops the run with status
/// blowup and the record collected so far.
RunRecord solve_td(const TDProblem& problem, const SolverConfig& config);

/// Integrates the fractal Burgers equation to t_end.
RunRecord solve_burgers(const GridFunction& u0, const SolverConfig& config);

struct PicardOptions {
  /// Replaces the advecting velocity by zero (so every iterate is the free
  /// semigroup evolution).
  bool disable_coupling = false;
  /// Lebesgue exponent of the smallness proxy.
  double proxy_p = 2.0;
};

struct PicardReport {
  /// d_n = max over stored times of ||u^{n+1} - u^n||_inf.
  std::vector<double> differences;
  /// d_{n+1} / d_n (0 when d_n = 0).
  std::vector<double> ratios;
  /// Step used by every iterate.
  double dt = 0.0;
  /// sum_q (1 - exp(-kappa T 2^q))^{1/2} 2^{q/p} ||Delta_q u0||_{L^p}, kappa
  /// from the block decay fit; reported, never enforced.
  double smallness_proxy = 0.0;
  double kappa = 0.0;
  /// The iteration is defined for alpha = 1; other orders are an extension.
  bool extension = false;
};

struct PicardResult {
  std::vector<RunRecord> iterates;
  PicardReport report;
};

/// Iterate 0 is exp(-t nu Lambda^alpha) u0; iterate n+1 solves the linear
/// problem advected by iterate n (linear in time between its snapshots).
/// All iterates share one fixed step and store every step.
PicardResult picard_solve(const GridFunction& u0, const SolverConfig& config, int n_iters,
                          const PicardOptions& options = {});

}  // namespace fbl
