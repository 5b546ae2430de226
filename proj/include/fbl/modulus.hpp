#pragma once

#include <optional>
#include <vector>

#include "fbl/quadrature.hpp"
#include "fbl/spectral.hpp"

namespace fbl {

/// Concave modulus of continuity.
///
/// The standard family is
///   omega(xi) = xi / (1 + 4 pi sqrt(xi0 xi))   for 0 <= xi <= xi0,
///   omega(xi) = c_xi0 ln xi                     for xi >= xi0,
/// with c_xi0 fixed by continuity at xi0.  `linear()` gives omega(xi) = xi,
/// which is only useful as a test case.
///
/// Everything is evaluated in long double: the inverse at a few units lives
/// near exp(700) and beyond for large xi0, past the range of double.
class Modulus {
 public:
  static Modulus standard(Extended xi0 = 1e10L);
  static Modulus linear();

  bool is_linear() const { return linear_; }
  Extended xi0() const { return xi0_; }
  Extended c_xi0() const { return c_xi0_; }

  Extended value(Extended xi) const;
  /// omega'; at xi0 the left derivative.
  Extended derivative(Extended xi) const;
  /// omega''; at xi0 the left value.
  Extended second_derivative(Extended xi) const;

  /// Point where omega is only Lipschitz, if any.
  std::optional<Extended> kink() const;

 private:
  Modulus(Extended xi0, Extended c_xi0, bool linear);

  Extended xi0_;
  Extended c_xi0_;
  Extended a_;  // 4 pi sqrt(xi0)
  bool linear_;
};

enum class ModulusMode { value, derivative };

/// omega(xi) or omega'(xi).  Negative xi raises ParameterError.
Extended modulus_eval(Extended xi, const Modulus& m, ModulusMode mode);

/// omega^{-1}(y) by bisection in log xi, accurate to
/// |omega(result) - y| < 1e-12 max(1, y).  RangeError when the preimage
/// exceeds the long double range.
Extended modulus_inverse(Extended y, const Modulus& m);

/// Detailed result of the J quadrature.
struct JResult {
  Extended value = 0;
  Extended error_estimate = 0;
  /// Where the far integral was truncated.
  Extended eta_max = 0;
  bool converged = true;
};

/// J(xi) = (1/pi) int_0^{xi/2} [omega(xi+2e) + omega(xi-2e) - 2 omega(xi)] / e^2 de
///       + (1/pi) int_{xi/2}^inf [omega(2e+xi) - omega(2e-xi) - 2 omega(xi)] / e^2 de
/// to relative accuracy `tol`.  Both integrands are non-positive for concave
/// omega.  At the kink xi = xi0 the first integrand behaves like
/// (omega'_+ - omega'_-) 2/e near 0 and J is -infinity.
///
/// `eta_max`, when given, replaces the automatic truncation of the far
/// integral (the -2 omega(xi) / eta tail is always added in closed form).
JResult j_integral_detailed(Extended xi, const Modulus& m, Extended tol,
                            std::optional<Extended> eta_max = std::nullopt);

Extended j_integral(Extended xi, const Modulus& m, Extended tol);

struct NegativityRow {
  Extended xi = 0;
  Extended omega = 0;
  Extended omega_prime = 0;
  Extended j = 0;
  /// omega omega' + J.
  Extended sum = 0;
};

struct NegativityReport {
  std::vector<NegativityRow> rows;
  /// Largest omega omega' + J; -inf without data.
  Extended max_sum = 0;
  /// Every row strictly negative (vacuously true on an empty grid).
  bool all_negative = true;
  bool has_data = false;
};

/// omega omega' + J at every grid point.  The grid must be positive and
/// sorted.
NegativityReport negativity_scan(const Modulus& m, const std::vector<Extended>& xi_grid,
                                 Extended tol = 1e-8L);

/// C0 = omega^{-1}(2.5 u0_sup), which puts omega(C0) strictly inside
/// (2 u0_sup, 3 u0_sup).
Extended c0_select(Extended u0_sup, const Modulus& m);

/// lambda = omega^{-1}(3 u0_sup) / (2 u0_sup) * grad_sup_T1.
Extended lambda_select(Extended u0_sup, Extended grad_sup_T1, const Modulus& m);

struct WitnessPair {
  double x = 0.0;
  double y = 0.0;
  double difference = 0.0;
  Extended omega = 0;
};

struct ModulusCheckReport {
  bool passed = true;
  WitnessPair worst_pair;
  /// min over pairs of omega(lambda d) - |u(x) - u(y)|.
  Extended margin = 0;
};

/// Checks |u(x_i) - u(x_j)| < omega(lambda d(x_i, x_j)) over all grid pairs,
/// d the periodic distance.  Separations are scanned from the smallest; once
/// omega(lambda d) minus the oscillation of u cannot beat the current
/// margin, the remaining separations are skipped.
ModulusCheckReport modulus_check(const GridFunction& u, Extended lambda, const Modulus& m);

}  // namespace fbl
