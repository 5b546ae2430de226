#include "fbl/modulus.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "fbl/error.hpp"

namespace fbl {
namespace {

constexpr Extended kPi = 3.141592653589793238462643383279502884L;

// J integrands on either side of eta = xi/2 switch to the Taylor value
// 4 omega''(xi) below this fraction of xi.
constexpr Extended kTaylorFraction = 1e-4L;

// Relative scale below which J is treated as zero, in units of omega(xi)/xi.
constexpr Extended kFloorScale = 1e-3L;

constexpr int kMaxPanels = 4000;

void require_nonnegative(Extended xi) {
  if (!(xi >= 0)) throw ParameterError("modulus argument must be non-negative, got " + std::to_string(double(xi)));
}

}  // namespace

Modulus::Modulus(Extended xi0, Extended c_xi0, bool linear)
    : xi0_(xi0), c_xi0_(c_xi0), a_(4 * kPi * std::sqrt(xi0)), linear_(linear) {}

Modulus Modulus::standard(Extended xi0) {
  if (!(xi0 > 1) || !std::isfinite(xi0)) throw ParameterError("modulus xi0 must be finite and > 1");
  const Extended at_xi0 = xi0 / (1 + 4 * kPi * xi0);
  return Modulus(xi0, at_xi0 / std::log(xi0), false);
}

Modulus Modulus::linear() { return Modulus(std::numeric_limits<Extended>::infinity(), 0, true); }

std::optional<Extended> Modulus::kink() const {
  if (linear_) return std::nullopt;
  return xi0_;
}

Extended Modulus::value(Extended xi) const {
  require_nonnegative(xi);
  if (linear_) return xi;
  if (xi <= xi0_) return xi / (1 + a_ * std::sqrt(xi));
  return c_xi0_ * std::log(xi);
}

Extended Modulus::derivative(Extended xi) const {
  require_nonnegative(xi);
  if (linear_) return 1;
  if (xi <= xi0_) {
    const Extended as = a_ * std::sqrt(xi);
    return (2 + as) / (2 * (1 + as) * (1 + as));
  }
  return c_xi0_ / xi;
}

Extended Modulus::second_derivative(Extended xi) const {
  require_nonnegative(xi);
  if (linear_) return 0;
  if (xi <= xi0_) {
    const Extended s = std::sqrt(xi);
    const Extended as = a_ * s;
    return -a_ * (3 + as) / (4 * s * (1 + as) * (1 + as) * (1 + as));
  }
  return -c_xi0_ / (xi * xi);
}

Extended modulus_eval(Extended xi, const Modulus& m, ModulusMode mode) {
  return mode == ModulusMode::value ? m.value(xi) : m.derivative(xi);
}

Extended modulus_inverse(Extended y, const Modulus& m) {
  if (!(y >= 0)) throw ParameterError("modulus_inverse: y must be non-negative");
  if (y == 0) return 0;
  if (!std::isfinite(y)) throw RangeError("modulus_inverse: y must be finite");
  if (m.is_linear()) return y;

  // omega(xi) <= xi, so log y is a lower bracket; expand the upper one.
  // Slightly inside the range so exp(log_max) cannot round up to infinity.
  const Extended log_max = std::log(std::numeric_limits<Extended>::max()) * (1 - 1e-12L);
  auto residual = [&](Extended log_xi) { return m.value(std::exp(log_xi)) - y; };
  const Extended lo = std::log(y);
  Extended hi = std::max<Extended>(lo, 0) + 1;
  while (residual(hi) < 0) {
    hi = 2 * hi + 1;
    if (hi > log_max) {
      if (residual(log_max) < 0)
        throw RangeError("modulus_inverse: preimage of " + std::to_string(double(y)) +
                         " exceeds the extended floating-point range");
      hi = log_max;
    }
  }
  if (residual(lo) >= 0) return y;

  boost::math::tools::eps_tolerance<Extended> tolerance(std::numeric_limits<Extended>::digits - 2);
  std::uintmax_t iterations = 400;
  const auto [a, b] = boost::math::tools::bisect(residual, lo, hi, tolerance, iterations);
  const Extended ra = std::fabs(residual(a));
  const Extended rb = std::fabs(residual(b));
  const Extended result = std::exp(ra <= rb ? a : b);
  if (std::fabs(m.value(result) - y) >= 1e-12L * std::max<Extended>(1, y))
    throw NumericalError("modulus_inverse: bisection did not reach the target accuracy");
  return result;
}

JResult j_integral_detailed(Extended xi, const Modulus& m, Extended tol, std::optional<Extended> eta_max) {
  if (!(xi > 0) || !std::isfinite(xi)) throw ParameterError("j_integral: xi must be positive and finite");
  if (!(tol >= 1e-12L)) throw ParameterError("j_integral: tol must be >= 1e-12");
  if (eta_max && !(*eta_max > xi / 2)) throw ParameterError("j_integral: eta_max must exceed xi/2");

  JResult result;
  const auto kink = m.kink();
  if (kink && xi == *kink) {
    result.value = -std::numeric_limits<Extended>::infinity();
    result.eta_max = std::numeric_limits<Extended>::infinity();
    return result;
  }

  const Extended w = m.value(xi);
  const Extended floor = kFloorScale * w / xi;
  const Extended rel = tol / 10;
  const Extended abs_piece = tol * floor / 100;

  // Near eta = 0 the first integrand tends to 4 omega''(xi), valid as long
  // as [xi - 2 eta, xi + 2 eta] stays on one side of the kink.
  Extended taylor_cut = kTaylorFraction * xi;
  if (kink) taylor_cut = std::min(taylor_cut, std::fabs(xi - *kink) / 4);
  const Extended taylor_value = 4 * m.second_derivative(xi);

  auto near = [&](Extended eta) -> Extended {
    if (eta < taylor_cut) return taylor_value;
    const Extended lower = std::max<Extended>(xi - 2 * eta, 0);
    return (m.value(xi + 2 * eta) + m.value(lower) - 2 * w) / (eta * eta);
  };
  auto far = [&](Extended eta) -> Extended {
    const Extended lower = std::max<Extended>(2 * eta - xi, 0);
    return (m.value(2 * eta + xi) - m.value(lower) - 2 * w) / (eta * eta);
  };

  Extended total = 0;
  Extended error = 0;
  auto accumulate = [&](const auto& f, Extended a, Extended b) {
    if (!(b > a)) return;
    const QuadratureResult piece = integrate_adaptive(f, a, b, abs_piece, rel);
    total += piece.value;
    error += piece.error;
    result.converged = result.converged && piece.converged;
  };

  // First integral on [0, xi/2], split where an argument crosses the kink.
  std::vector<Extended> cuts = {0, taylor_cut, xi / 2};
  if (kink) {
    const Extended crossing = std::fabs(*kink - xi) / 2;
    if (crossing > 0 && crossing < xi / 2) cuts.push_back(crossing);
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) accumulate(near, cuts[i], cuts[i + 1]);

  // Second integral on geometric panels [e, 2e] from xi/2, split at kinks.
  std::vector<Extended> far_kinks;
  if (kink) {
    far_kinks.push_back((*kink - xi) / 2);
    far_kinks.push_back((*kink + xi) / 2);
  }
  Extended left = xi / 2;
  bool done = false;
  for (int panel = 0; panel < kMaxPanels && !done; ++panel) {
    Extended right = 2 * left;
    if (eta_max) {
      if (right >= *eta_max) {
        right = *eta_max;
        done = true;
      }
    }
    std::vector<Extended> edges = {left, right};
    for (Extended k : far_kinks)
      if (k > left && k < right) edges.push_back(k);
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) accumulate(far, edges[i], edges[i + 1]);
    left = right;

    if (!eta_max) {
      // omega(2e+xi) - omega(2e-xi) <= 2 xi omega'(2e-xi), decreasing in e.
      const Extended bound = 2 * xi * m.derivative(2 * left - xi) / left;
      const Extended running = std::fabs(total - 2 * w / left);
      done = bound / kPi <= rel * std::max(running / kPi, floor);
    }
  }
  if (!done) result.converged = false;

  result.eta_max = left;
  result.value = (total - 2 * w / left) / kPi;
  result.error_estimate = error / kPi;
  return result;
}

Extended j_integral(Extended xi, const Modulus& m, Extended tol) {
  const JResult r = j_integral_detailed(xi, m, tol);
  if (!r.converged) throw NumericalError("j_integral: quadrature did not converge at xi = " + std::to_string(double(xi)));
  return r.value;
}

NegativityReport negativity_scan(const Modulus& m, const std::vector<Extended>& xi_grid, Extended tol) {
  NegativityReport report;
  report.max_sum = -std::numeric_limits<Extended>::infinity();
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    if (!(xi_grid[i] > 0)) throw ParameterError("negativity_scan: grid must be positive");
    if (i > 0 && !(xi_grid[i] > xi_grid[i - 1])) throw ParameterError("negativity_scan: grid must be sorted");
  }
  for (Extended xi : xi_grid) {
    NegativityRow row;
    row.xi = xi;
    row.omega = m.value(xi);
    row.omega_prime = m.derivative(xi);
    row.j = j_integral(xi, m, tol);
    row.sum = row.omega * row.omega_prime + row.j;
    report.max_sum = std::max(report.max_sum, row.sum);
    report.all_negative = report.all_negative && row.sum < 0;
    report.rows.push_back(row);
  }
  report.has_data = !report.rows.empty();
  return report;
}

Extended c0_select(Extended u0_sup, const Modulus& m) {
  if (!(u0_sup > 0)) throw ParameterError("c0_select: u0_sup must be positive");
  const Extended c0 = modulus_inverse(Extended(2.5L) * u0_sup, m);
  const Extended w = m.value(c0);
  if (!(w > 2 * u0_sup && w < 3 * u0_sup)) throw NumericalError("c0_select: omega(C0) left the open bracket");
  return c0;
}

Extended lambda_select(Extended u0_sup, Extended grad_sup_T1, const Modulus& m) {
  if (!(u0_sup > 0)) throw ParameterError("lambda_select: u0_sup must be positive");
  if (!(grad_sup_T1 > 0)) throw ParameterError("lambda_select: grad_sup_T1 must be positive");
  return modulus_inverse(3 * u0_sup, m) / (2 * u0_sup) * grad_sup_T1;
}

ModulusCheckReport modulus_check(const GridFunction& u, Extended lambda, const Modulus& m) {
  if (!(lambda > 0)) throw ParameterError("modulus_check: lambda must be positive");
  const DomainSpec& domain = u.domain();
  const std::size_t n = u.size();
  const auto samples = u.samples();
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const Extended oscillation = Extended(*hi_it) - Extended(*lo_it);

  ModulusCheckReport report;
  report.margin = std::numeric_limits<Extended>::infinity();
  for (std::size_t sep = 1; sep <= n / 2; ++sep) {
    const Extended d = Extended(domain.length()) * Extended(sep) / Extended(n);
    const Extended w = m.value(lambda * d);
    if (w - oscillation >= report.margin) break;  // omega_lambda is increasing in d
    Extended worst = -1;
    std::size_t at = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Extended diff = std::fabs(Extended(samples[(i + sep) % n]) - Extended(samples[i]));
      if (diff > worst) {
        worst = diff;
        at = i;
      }
    }
    if (w - worst < report.margin) {
      report.margin = w - worst;
      report.worst_pair = {domain.x(at), domain.x((at + sep) % n), double(worst), w};
    }
  }
  report.passed = report.margin > 0;
  return report;
}

}  // namespace fbl
