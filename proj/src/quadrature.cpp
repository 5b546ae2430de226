#include "fbl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace fbl {
namespace {

// Kronrod abscissae on [-1, 1] (non-negative half, descending); the odd
// entries are the 7-point Gauss nodes.
constexpr Extended kXgk[8] = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
constexpr Extended kWgk[8] = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
constexpr Extended kWg[4] = {0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
                             0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

struct Segment {
  Extended a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod(const std::function<Extended(Extended)>& f, Extended a, Extended b) {
  const Extended centre = (a + b) / 2;
  const Extended half = (b - a) / 2;
  const Extended fc = f(centre);
  Extended kron = kWgk[7] * fc;
  Extended gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const Extended dx = half * kXgk[j];
    const Extended sum = f(centre - dx) + f(centre + dx);
    kron += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  return {a, b, kron * half, std::fabs((kron - gauss) * half)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<Extended(Extended)>& f, Extended a, Extended b,
                                    Extended abs_tol, Extended rel_tol, int max_intervals) {
  QuadratureResult result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  std::priority_queue<Segment> heap;
  Segment first = kronrod(f, a, b);
  result.evaluations = 15;
  Extended total = first.value;
  Extended error = first.error;
  heap.push(first);

  while (error > std::max(abs_tol, rel_tol * std::fabs(total)) && static_cast<int>(heap.size()) < max_intervals) {
    Segment worst = heap.top();
    const Extended mid = (worst.a + worst.b) / 2;
    if (!(mid > worst.a && mid < worst.b)) break;  // interval can no longer be split
    heap.pop();
    Segment left = kronrod(f, worst.a, mid);
    Segment right = kronrod(f, mid, worst.b);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the leaves to drop the drift of the running updates.
  total = 0;
  error = 0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  result.value = total;
  result.error = error;
  result.converged = error <= std::max(abs_tol, rel_tol * std::fabs(total));
  return result;
}

}  // namespace fbl
