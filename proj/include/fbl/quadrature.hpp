#pragma once

#include <functional>

namespace fbl {

using Extended = long double;

struct QuadratureResult {
  Extended value = 0;
  Extended error = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].  The
/// interval with the largest error estimate is bisected until the total
/// error is below max(abs_tol, rel_tol |value|) or `max_intervals` is reached.
QuadratureResult integrate_adaptive(const std::function<Extended(Extended)>& f, Extended a, Extended b,
                                    Extended abs_tol, Extended rel_tol, int max_intervals = 4000);

}  // namespace fbl
