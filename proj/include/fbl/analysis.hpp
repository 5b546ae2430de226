#pragma once

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fbl/littlewood_paley.hpp"
#include "fbl/modulus.hpp"
#include "fbl/solver.hpp"

namespace fbl {

/// (t, value) pairs.
using TimeSeries = std::vector<std::pair<double, double>>;

struct BlowupIntegral {
  double total = 0.0;
  /// Cumulative trapezoidal integral of ||d_x u||_inf at every diagnostic row.
  TimeSeries cumulative;
};

/// Integral of ||d_x u(t)||_inf over the diagnostic rows of a run; at least
/// two rows are required.
BlowupIntegral blowup_integral(const RunRecord& record);

struct SmoothingProfile {
  TimeSeries series;
  double sup = 0.0;
};

/// t -> t^beta ||u(t) - mean||_{B^{1/p + beta}_{p,1}} over the stored
/// snapshots.  `spec.s` must equal 1/p; the shift by beta is applied here.
SmoothingProfile smoothing_profile(const RunRecord& record, double beta, const BesovSpec& spec,
                                   const DyadicPartition& part);

struct AprioriOptions {
  /// Time exponent of the left-hand norm; infinity allowed.
  double rho = std::numeric_limits<double>::infinity();
  /// Time exponent of the forcing norm, 1 <= rho1 <= rho.
  double rho1 = 1.0;
  /// Lebesgue exponent of the Besov part of Z(T).
  double p1 = 2.0;
};

struct AprioriReport {
  double lhs = 0.0;
  double rhs_core = 0.0;
  double z_T = 0.0;
  /// lhs / (exp(z_T) rhs_core); 0 when lhs = 0 and +inf when only rhs_core vanishes.
  double ratio = 0.0;
  std::vector<std::string> warnings;
};

/// Compares nu^{1/rho} ||u||_{L~^rho_T B^{s + alpha/rho}_{p,r}} with
///   exp(Z(T)) (||u0||_{B^s_{p,r}} + nu^{1/rho1 - 1} ||f||_{L~^rho1_T B^{s - alpha + alpha/rho1}_{p,r}}),
/// where Z(T) integrates max(||d_x v||_{B^{1/p1}_{p1,inf}}, ||d_x v||_inf) in time.  The mean of
/// every field is removed before the homogeneous norms are taken.
/// `velocity` needs at least two entries; `forcing` may be empty (f = 0).
AprioriReport apriori_ratio(const RunRecord& record, std::span<const Snapshot> velocity, const BesovSpec& spec,
                            const DyadicPartition& part, const AprioriOptions& options = {},
                            std::span<const Snapshot> forcing = {});

/// First stored snapshot time with t >= fraction * t_end; ParameterError if
/// there is none.
double first_time_after(const RunRecord& record, double fraction = 0.01);

}  // namespace fbl
