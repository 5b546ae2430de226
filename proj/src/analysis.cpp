#include "fbl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbl/error.hpp"

namespace fbl {
namespace {

std::vector<Snapshot> mean_free(std::span<const Snapshot> series) {
  std::vector<Snapshot> out;
  out.reserve(series.size());
  for (const Snapshot& s : series) out.push_back({s.t, remove_mean(s.u)});
  return out;
}

double nu_power(double nu, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(nu, exponent);
}

}  // namespace

BlowupIntegral blowup_integral(const RunRecord& record) {
  const auto& rows = record.diagnostics;
  if (rows.size() < 2) throw ParameterError("blowup_integral needs at least two diagnostic rows");
  BlowupIntegral out;
  out.cumulative.reserve(rows.size());
  double total = 0.0;
  out.cumulative.emplace_back(rows.front().t, 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    total += 0.5 * (rows[i].t - rows[i - 1].t) * (rows[i].grad_sup + rows[i - 1].grad_sup);
    out.cumulative.emplace_back(rows[i].t, total);
  }
  out.total = total;
  return out;
}

SmoothingProfile smoothing_profile(const RunRecord& record, double beta, const BesovSpec& spec,
                                   const DyadicPartition& part) {
  spec.validate();
  if (!(beta > 0.0)) throw ParameterError("smoothing_profile: beta must be positive");
  if (std::fabs(spec.s - 1.0 / spec.p) > 1e-12) throw ParameterError("smoothing_profile: spec.s must equal 1/p");
  const BesovSpec shifted{spec.s + beta, spec.p, 1.0};
  SmoothingProfile out;
  for (const Snapshot& snap : record.snapshots) {
    const double value = std::pow(snap.t, beta) * besov_norm(remove_mean(snap.u), shifted, part);
    out.series.emplace_back(snap.t, value);
    out.sup = std::max(out.sup, value);
  }
  return out;
}

AprioriReport apriori_ratio(const RunRecord& record, std::span<const Snapshot> velocity, const BesovSpec& spec,
                            const DyadicPartition& part, const AprioriOptions& options,
                            std::span<const Snapshot> forcing) {
  spec.validate();
  const double rho = options.rho;
  const double rho1 = options.rho1;
  const double p1 = options.p1;
  if (!(rho1 >= 1.0 && rho1 <= rho)) throw ParameterError("apriori_ratio: need 1 <= rho1 <= rho");
  if (!(p1 >= 1.0)) throw ParameterError("apriori_ratio: p1 must be >= 1");
  if (record.snapshots.empty()) throw ParameterError("apriori_ratio: record has no snapshots");
  if (velocity.size() < 2) throw ParameterError("apriori_ratio: velocity series needs at least two entries");

  AprioriReport report;
  const auto warn = [&](const std::string& text) { report.warnings.push_back(text); };
  if (spec.p > p1) warn("p exceeds p1");
  const double inv_p1 = std::isinf(p1) ? 0.0 : 1.0 / p1;
  const double inv_p_dual = std::isinf(spec.p) ? 1.0 : 1.0 - 1.0 / spec.p;
  const double upper = 1.0 + inv_p1;
  if (spec.r == 1.0 ? spec.s > upper : spec.s >= upper) warn("s above the admissible range");
  if (!(spec.s > -std::min(inv_p1, inv_p_dual))) warn("s below the admissible range");

  const EvolutionParams& params = record.config.params;
  const double inv_rho = std::isinf(rho) ? 0.0 : 1.0 / rho;
  const double inv_rho1 = std::isinf(rho1) ? 0.0 : 1.0 / rho1;

  const std::vector<Snapshot> u = mean_free(record.snapshots);
  const BesovSpec lhs_spec{spec.s + params.alpha * inv_rho, spec.p, spec.r};
  report.lhs = nu_power(params.nu, inv_rho) *
               spacetime_besov_norm(u, lhs_spec, rho, SpacetimeVariant::tilde, part);

  report.rhs_core = besov_norm(u.front().u, spec, part);
  if (!forcing.empty()) {
    const std::vector<Snapshot> f = mean_free(forcing);
    const BesovSpec f_spec{spec.s - params.alpha + params.alpha * inv_rho1, spec.p, spec.r};
    const double f_norm = spacetime_besov_norm(f, f_spec, rho1, SpacetimeVariant::tilde, part);
    if (f_norm > 0.0) report.rhs_core += nu_power(params.nu, inv_rho1 - 1.0) * f_norm;
  }

  const BesovSpec z_spec{inv_p1, p1, std::numeric_limits<double>::infinity()};
  std::vector<double> z_density;
  for (const Snapshot& v : velocity) {
    const GridFunction dv = spatial_derivative(v.u);
    z_density.push_back(std::max(besov_norm(dv, z_spec, part), sup_norm(dv)));
  }
  for (std::size_t i = 1; i < velocity.size(); ++i)
    report.z_T += 0.5 * (velocity[i].t - velocity[i - 1].t) * (z_density[i] + z_density[i - 1]);

  if (report.lhs == 0.0) {
    report.ratio = 0.0;
  } else if (report.rhs_core == 0.0) {
    report.ratio = std::numeric_limits<double>::infinity();
  } else {
    report.ratio = report.lhs / (std::exp(report.z_T) * report.rhs_core);
  }
  return report;
}

double first_time_after(const RunRecord& record, double fraction) {
  const double threshold = fraction * record.config.t_end;
  for (const Snapshot& s : record.snapshots)
    if (s.t > 0.0 && s.t >= threshold) return s.t;
  std::ostringstream msg;
  msg << "no stored snapshot at or after t = " << threshold;
  throw ParameterError(msg.str());
}

}  // namespace fbl
