#include "fbl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fbl/error.hpp"

namespace fbl {

int integrator_order(Integrator integrator) {
  return integrator == Integrator::exponential_rk2 ? 2 : 4;
}

std::string to_string(Integrator integrator) {
  return integrator == Integrator::exponential_rk2 ? "exponential_rk2" : "exponential_rk4";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "exponential_rk2") return Integrator::exponential_rk2;
  if (name == "exponential_rk4") return Integrator::exponential_rk4;
  throw ParameterError("unknown integrator '" + name + "'");
}

void SolverConfig::validate() const {
  params.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ParameterError("t_end must be positive");
  if (dt && !(*dt > 0.0)) throw ParameterError("dt must be positive when set");
  if (!(cfl > 0.0)) throw ParameterError("cfl must be positive");
  if (snapshot_stride < 1) throw ParameterError("snapshot_stride must be a positive integer");
}

TimeField constant_field(GridFunction value) {
  return [value = std::move(value)](double) { return value; };
}

TimeField interpolated_field(std::vector<Snapshot> snapshots) {
  if (snapshots.empty()) throw ParameterError("interpolated field needs at least one snapshot");
  return [snaps = std::move(snapshots)](double t) -> GridFunction {
    if (t <= snaps.front().t) return snaps.front().u;
    if (t >= snaps.back().t) return snaps.back().u;
    auto hi = std::upper_bound(snaps.begin(), snaps.end(), t,
                               [](double value, const Snapshot& s) { return value < s.t; });
    auto lo = hi - 1;
    const double theta = (t - lo->t) / (hi->t - lo->t);
    if (theta == 0.0) return lo->u;
    return (1.0 - theta) * lo->u + theta * hi->u;
  };
}

double cfl_timestep(const GridFunction& u, const SolverConfig& config) {
  const double speed = std::max(sup_norm(u), 1e-12);
  const double bound = config.cfl * u.domain().dx() / speed;
  return config.dt ? std::min(*config.dt, bound) : bound;
}

namespace {

using Rhs = std::function<GridFunction(double, const GridFunction&)>;

GridFunction lawson_step(const GridFunction& u, const Rhs& rhs, double t, const EvolutionParams& params,
                         double h, Integrator integrator) {
  auto propagate = [&](const GridFunction& w, double s) { return semigroup_apply(w, s, params); };

  if (integrator == Integrator::exponential_rk2) {
    const GridFunction k1 = rhs(t, u);
    const GridFunction k2 = rhs(t + h, propagate(u + h * k1, h));
    return propagate(u + (0.5 * h) * k1, h) + (0.5 * h) * k2;
  }

  const GridFunction e_half_u = propagate(u, 0.5 * h);
  const GridFunction e_full_u = propagate(u, h);
  const GridFunction k1 = rhs(t, u);
  const GridFunction k2 = rhs(t + 0.5 * h, propagate(u + (0.5 * h) * k1, 0.5 * h));
  const GridFunction k3 = rhs(t + 0.5 * h, e_half_u + (0.5 * h) * k2);
  const GridFunction k4 = rhs(t + h, e_full_u + h * propagate(k3, 0.5 * h));
  GridFunction increment = propagate(k1, h) + 2.0 * propagate(k2 + k3, 0.5 * h) + k4;
  return e_full_u + (h / 6.0) * increment;
}

// -v d_x w + f, product dealiased by the 2/3 rule.
Rhs transport_rhs(const TimeField& velocity, const TimeField& forcing) {
  return [&velocity, &forcing](double s, const GridFunction& w) {
    GridFunction out = -dealias(pointwise_product(velocity(s), spatial_derivative(w)));
    if (forcing) out += forcing(s);
    return out;
  };
}

GridFunction burgers_rhs(const GridFunction& w) {
  return -dealias(pointwise_product(w, spatial_derivative(w)));
}

DiagnosticRow diagnose(const GridFunction& u, double t, double dt, const DiagnosticRow* previous) {
  DiagnosticRow row;
  row.t = t;
  row.dt = dt;
  row.sup_norm = sup_norm(u);
  row.grad_sup = sup_norm(spatial_derivative(u));
  row.l2_norm = lebesgue_norm(u, 2.0);
  row.mean = u.mean();
  if (previous) {
    row.blowup_cumulative =
        previous->blowup_cumulative + 0.5 * (t - previous->t) * (previous->grad_sup + row.grad_sup);
  }
  return row;
}

using Stepper = std::function<GridFunction(const GridFunction&, double t, double dt)>;
using StepPolicy = std::function<double(const GridFunction& u, double t)>;

// Shared time loop.  `policy` proposes the next step; the last step is
// clipped to land on t_end exactly.
RunRecord integrate(const GridFunction& u0, const SolverConfig& config, const Stepper& stepper,
                    const StepPolicy& policy) {
  RunRecord record;
  record.config = config;
  GridFunction u = u0;
  double t = 0.0;
  record.diagnostics.push_back(diagnose(u, t, 0.0, nullptr));
  record.snapshots.push_back({t, u});

  long steps = 0;
  while (t < config.t_end) {
    double dt = policy(u, t);
    bool last = false;
    if (t + dt >= config.t_end * (1.0 - 1e-14)) {
      dt = config.t_end - t;
      last = true;
    }
    try {
      u = stepper(u, t, dt);
    } catch (const NumericalError&) {
      record.status = RunStatus::blowup;
      std::ostringstream msg;
      msg << "numerical blow-up: non-finite state in the step from t=" << t;
      record.warnings.push_back(msg.str());
      break;
    }
    t = last ? config.t_end : t + dt;
    ++steps;
    record.diagnostics.push_back(diagnose(u, t, dt, &record.diagnostics.back()));
    if (last || steps % config.snapshot_stride == 0) record.snapshots.push_back({t, u});
  }
  return record;
}

}  // namespace

GridFunction step_td(const GridFunction& u, const TimeField& velocity, const TimeField& forcing,
                     double t, const EvolutionParams& params, double dt, Integrator integrator) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  return lawson_step(u, transport_rhs(velocity, forcing), t, params, dt, integrator);
}

GridFunction step_td(const GridFunction& u, const GridFunction& velocity, const GridFunction& forcing,
                     const EvolutionParams& params, double dt, Integrator integrator) {
  return step_td(u, constant_field(velocity), constant_field(forcing), 0.0, params, dt, integrator);
}

GridFunction step_burgers(const GridFunction& u, const EvolutionParams& params, double dt,
                          Integrator integrator) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  const Rhs rhs = [](double, const GridFunction& w) { return burgers_rhs(w); };
  return lawson_step(u, rhs, 0.0, params, dt, integrator);
}

RunRecord solve_td(const TDProblem& problem, const SolverConfig& config) {
  config.validate();
  if (!(problem.u0.domain() == config.domain)) throw ParameterError("u0 does not live on the configured domain");
  if (!problem.velocity) throw ParameterError("transport problem needs a velocity field");
  const Stepper stepper = [&](const GridFunction& u, double t, double dt) {
    return step_td(u, problem.velocity, problem.forcing, t, config.params, dt, config.integrator);
  };
  const StepPolicy policy = [&](const GridFunction&, double t) {
    return cfl_timestep(problem.velocity(t), config);
  };
  return integrate(problem.u0, config, stepper, policy);
}

RunRecord solve_burgers(const GridFunction& u0, const SolverConfig& config) {
  config.validate();
  if (!(u0.domain() == config.domain)) throw ParameterError("u0 does not live on the configured domain");
  const Stepper stepper = [&](const GridFunction& u, double, double dt) {
    return step_burgers(u, config.params, dt, config.integrator);
  };
  const StepPolicy policy = [&](const GridFunction& u, double) { return cfl_timestep(u, config); };
  return integrate(u0, config, stepper, policy);
}

namespace {

double block_decay_constant(const GridFunction& u0, const EvolutionParams& params,
                            const DyadicPartition& part, double p) {
  if (params.nu == 0.0) return 0.0;
  double kappa = std::numeric_limits<double>::infinity();
  const GridFunction centred = remove_mean(u0);
  for (int q = part.q_min(); q <= part.q_max(); ++q) {
    const double nominal = params.nu * std::exp2(params.alpha * q);
    const double tau = 0.5 / nominal;
    const std::vector<double> times{0.0, tau, 2.0 * tau, 3.0 * tau};
    try {
      kappa = std::min(kappa, semigroup_block_decay(centred, q, params, times, part, p) / nominal);
    } catch (const Error&) {
      // empty or fully decayed block: no information about kappa
    }
  }
  return std::isfinite(kappa) ? kappa : 0.0;
}

}  // namespace

PicardResult picard_solve(const GridFunction& u0, const SolverConfig& config, int n_iters,
                          const PicardOptions& options) {
  config.validate();
  if (n_iters < 1) throw ParameterError("Picard iteration count must be positive");
  if (!(u0.domain() == config.domain)) throw ParameterError("u0 does not live on the configured domain");

  PicardResult result;
  PicardReport& report = result.report;
  report.extension = config.params.alpha != 1.0;
  // By the maximum principle no iterate exceeds ||u0||_inf, so one step fits all.
  report.dt = cfl_timestep(u0, config);

  SolverConfig inner = config;
  inner.snapshot_stride = 1;
  const double fixed_dt = report.dt;
  const StepPolicy fixed = [fixed_dt](const GridFunction&, double) { return fixed_dt; };

  // Iterate 0: the free evolution, sampled on the common time grid.
  {
    const Stepper free_flow = [&](const GridFunction& u, double, double dt) {
      return semigroup_apply(u, dt, inner.params);
    };
    RunRecord first = integrate(u0, inner, free_flow, fixed);
    // Re-evaluate from u0 so iterate 0 carries no accumulated rounding.
    for (Snapshot& snap : first.snapshots) snap.u = semigroup_apply(u0, snap.t, inner.params);
    result.iterates.push_back(std::move(first));
  }

  const GridFunction zero = GridFunction::zeros(u0.domain());
  for (int n = 0; n < n_iters; ++n) {
    const RunRecord& previous = result.iterates.back();
    const TimeField velocity =
        options.disable_coupling ? constant_field(zero) : interpolated_field(previous.snapshots);
    const TimeField no_forcing;
    const Stepper stepper = [&](const GridFunction& u, double t, double dt) {
      return step_td(u, velocity, no_forcing, t, inner.params, dt, inner.integrator);
    };
    RunRecord next = integrate(u0, inner, stepper, fixed);
    for (const DiagnosticRow& row : next.diagnostics) {
      if (row.dt > 0.0 && row.dt * sup_norm(velocity(row.t)) > inner.cfl * u0.domain().dx() * (1.0 + 1e-12)) {
        next.warnings.push_back("CFL bound exceeded by the advecting iterate at t=" + std::to_string(row.t));
        break;
      }
    }

    double diff = 0.0;
    const std::size_t count = std::min(next.snapshots.size(), previous.snapshots.size());
    for (std::size_t k = 0; k < count; ++k) {
      diff = std::max(diff, sup_norm(next.snapshots[k].u - previous.snapshots[k].u));
    }
    report.differences.push_back(diff);
    const bool blew_up = next.status == RunStatus::blowup;
    result.iterates.push_back(std::move(next));
    if (blew_up) break;
  }
  for (std::size_t n = 1; n < report.differences.size(); ++n) {
    const double prev = report.differences[n - 1];
    report.ratios.push_back(prev > 0.0 ? report.differences[n] / prev : 0.0);
  }

  const DyadicPartition part(u0.domain());
  report.kappa = block_decay_constant(u0, config.params, part, options.proxy_p);
  const GridFunction centred = remove_mean(u0);
  double proxy = 0.0;
  for (int q = part.q_min(); q <= part.q_max(); ++q) {
    const double growth = config.params.nu * std::exp2(config.params.alpha * q);
    const double factor = std::sqrt(1.0 - std::exp(-report.kappa * config.t_end * growth));
    proxy += factor * std::exp2(q / options.proxy_p) *
             lebesgue_norm(dyadic_block(centred, q, part), options.proxy_p);
  }
  report.smallness_proxy = proxy;
  return result;
}

}  // namespace fbl
