#include "fbl/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fbl/error.hpp"

namespace fbl {
namespace {

constexpr double kChiInner = 3.0 / 4.0;
constexpr double kChiOuter = 4.0 / 3.0;

double bump_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double norm_over_time(std::span<const double> times, std::span<const double> values, double rho) {
  if (std::isinf(rho)) return *std::max_element(values.begin(), values.end());
  double integral = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double a = std::pow(values[i - 1], rho);
    const double b = std::pow(values[i], rho);
    integral += 0.5 * (times[i] - times[i - 1]) * (a + b);
  }
  return std::pow(integral, 1.0 / rho);
}

double sequence_norm(std::span<const double> weighted, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double w : weighted) m = std::max(m, w);
    return m;
  }
  double sum = 0.0;
  for (double w : weighted) sum += std::pow(w, r);
  return std::pow(sum, 1.0 / r);
}

void require_mean_zero(const GridFunction& u) {
  const double scale = sup_norm(u);
  if (std::abs(u.mean()) > 1e-10 * scale) {
    throw ParameterError("homogeneous Besov norms need mean-zero input (mean " +
                         std::to_string(u.mean()) + "); constants are not in S'_h");
  }
}

// Block norms ||Delta_q u||_{L^p}, q = q_min..q_max.
std::vector<double> block_norms(const GridFunction& u, double p, const DyadicPartition& part) {
  std::vector<double> norms;
  norms.reserve(static_cast<std::size_t>(part.shells()));
  for (int q = part.q_min(); q <= part.q_max(); ++q) {
    norms.push_back(lebesgue_norm(dyadic_block(u, q, part), p));
  }
  return norms;
}

std::vector<double> weighted_block_norms(std::span<const double> norms, double s, int q_min) {
  std::vector<double> out(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) {
    out[i] = std::exp2(s * static_cast<double>(q_min + static_cast<int>(i))) * norms[i];
  }
  return out;
}

// Blocks and cutoffs of one function, with out-of-range indices reading as
// zero (blocks) or as the empty/full sum (cutoffs).
class Localized {
 public:
  Localized(const GridFunction& u, const DyadicPartition& part)
      : part_(part), zero_(GridFunction::zeros(u.domain())), blocks_(decompose(u, part)) {
    cutoffs_.reserve(static_cast<std::size_t>(part.shells()) + 1);
    GridFunction running = zero_;
    cutoffs_.push_back(running);
    for (const GridFunction& b : blocks_.blocks) {
      running += b;
      cutoffs_.push_back(running);
    }
  }

  const GridFunction& block(int q) const { return part_.contains(q) ? blocks_.block(q) : zero_; }

  // S_q = sum_{j <= q-1} Delta_j.
  const GridFunction& cutoff(int q) const {
    const int clipped = std::clamp(q, part_.q_min(), part_.q_max() + 1);
    return cutoffs_[static_cast<std::size_t>(clipped - part_.q_min())];
  }

 private:
  const DyadicPartition& part_;
  GridFunction zero_;
  BlockDecomposition blocks_;
  std::vector<GridFunction> cutoffs_;
};

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = bump_exp(1.0 - t);
  const double b = bump_exp(t);
  return a / (a + b);
}

DyadicPartition::DyadicPartition(const DomainSpec& domain) : domain_(domain) {
  const double xi_min = domain.frequency(1);
  const double xi_max = domain.max_frequency();
  // Smallest range with chi(2^-q_min xi_min) = 0 and chi(2^-(q_max+1) xi_max) = 1,
  // so the truncated block sum telescopes to one on every nonzero mode.
  q_min_ = static_cast<int>(std::floor(std::log2(kChiInner * xi_min)));
  while (chi(std::ldexp(xi_min, -q_min_)) != 0.0) --q_min_;
  while (chi(std::ldexp(xi_min, -(q_min_ + 1))) == 0.0) ++q_min_;
  q_max_ = static_cast<int>(std::ceil(std::log2(kChiOuter * xi_max))) - 1;
  while (chi(std::ldexp(xi_max, -(q_max_ + 1))) != 1.0) ++q_max_;
  while (chi(std::ldexp(xi_max, -q_max_)) == 1.0) --q_max_;
  if (shells() < 3) {
    throw ConfigurationError("domain resolves only " + std::to_string(shells()) +
                             " dyadic shells, at least 3 are required");
  }
}

double DyadicPartition::chi(double xi) {
  return smooth_step((std::abs(xi) - kChiInner) / (kChiOuter - kChiInner));
}

double DyadicPartition::phi(double xi) { return chi(0.5 * xi) - chi(xi); }

double DyadicPartition::block_weight(int q, double xi) { return phi(std::ldexp(xi, -q)); }

double DyadicPartition::cutoff_weight(int q, double xi) const {
  double sum = 0.0;
  for (int j = q_min_; j <= q - 1; ++j) sum += block_weight(j, xi);
  return sum;
}

void BesovSpec::validate() const {
  if (!(p >= 1.0)) throw ParameterError("Besov p must lie in [1, inf], got " + std::to_string(p));
  if (!(r >= 1.0)) throw ParameterError("Besov r must lie in [1, inf], got " + std::to_string(r));
  if (!std::isfinite(s)) throw ParameterError("Besov s must be finite");
}

GridFunction dyadic_block(const GridFunction& u, int q, const DyadicPartition& part) {
  if (!part.contains(q)) {
    throw RangeError("dyadic index " + std::to_string(q) + " outside [" + std::to_string(part.q_min()) +
                     ", " + std::to_string(part.q_max()) + "]");
  }
  if (!(u.domain() == part.domain())) throw ParameterError("partition built for another domain");
  return apply_radial_multiplier(u, [q](double xi) { return DyadicPartition::block_weight(q, xi); });
}

GridFunction low_cutoff(const GridFunction& u, int q, const DyadicPartition& part) {
  if (q < part.q_min() || q > part.q_max() + 1) {
    throw RangeError("cutoff index " + std::to_string(q) + " outside [" + std::to_string(part.q_min()) +
                     ", " + std::to_string(part.q_max() + 1) + "]");
  }
  if (!(u.domain() == part.domain())) throw ParameterError("partition built for another domain");
  return apply_radial_multiplier(u, [&part, q](double xi) { return part.cutoff_weight(q, xi); });
}

GridFunction BlockDecomposition::sum() const {
  GridFunction total = GridFunction::zeros(blocks.front().domain());
  for (const GridFunction& b : blocks) total += b;
  return total;
}

BlockDecomposition decompose(const GridFunction& u, const DyadicPartition& part) {
  BlockDecomposition out;
  out.q_min = part.q_min();
  out.blocks.reserve(static_cast<std::size_t>(part.shells()));
  for (int q = part.q_min(); q <= part.q_max(); ++q) out.blocks.push_back(dyadic_block(u, q, part));
  return out;
}

double besov_norm(const GridFunction& u, const BesovSpec& spec, const DyadicPartition& part) {
  return besov_norm_report(u, spec, part).value;
}

BesovNormReport besov_norm_report(const GridFunction& u, const BesovSpec& spec,
                                  const DyadicPartition& part) {
  spec.validate();
  require_mean_zero(u);
  const std::vector<double> norms = block_norms(u, spec.p, part);
  const std::vector<double> weighted = weighted_block_norms(norms, spec.s, part.q_min());
  BesovNormReport report;
  report.q_min = part.q_min();
  report.q_max = part.q_max();
  report.value = sequence_norm(weighted, spec.r);
  if (report.value > 0.0) {
    report.top_shell_share = std::isinf(spec.r) ? weighted.back() / report.value
                                                : std::pow(weighted.back() / report.value, spec.r);
  }
  return report;
}

double spacetime_besov_norm(std::span<const Snapshot> series, const BesovSpec& spec, double rho,
                            SpacetimeVariant variant, const DyadicPartition& part) {
  spec.validate();
  if (!(rho >= 1.0)) throw ParameterError("time exponent rho must lie in [1, inf]");
  if (series.empty() || (!std::isinf(rho) && series.size() < 2)) {
    throw ParameterError("a finite time exponent needs at least two snapshots");
  }
  std::vector<double> times;
  std::vector<std::vector<double>> weighted;  // [time][q]
  for (const Snapshot& snap : series) {
    if (!times.empty() && !(snap.t > times.back())) {
      throw ParameterError("snapshot times must be strictly increasing");
    }
    require_mean_zero(snap.u);
    times.push_back(snap.t);
    weighted.push_back(weighted_block_norms(block_norms(snap.u, spec.p, part), spec.s, part.q_min()));
  }

  if (variant == SpacetimeVariant::plain) {
    std::vector<double> in_time(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) in_time[i] = sequence_norm(weighted[i], spec.r);
    return norm_over_time(times, in_time, rho);
  }
  const std::size_t shells = weighted.front().size();
  std::vector<double> per_block(shells);
  std::vector<double> column(times.size());
  for (std::size_t q = 0; q < shells; ++q) {
    for (std::size_t i = 0; i < times.size(); ++i) column[i] = weighted[i][q];
    per_block[q] = norm_over_time(times, column, rho);
  }
  return sequence_norm(per_block, spec.r);
}

GridFunction paraproduct(const GridFunction& f, const GridFunction& g, const DyadicPartition& part) {
  const Localized lf(f, part);
  const Localized lg(g, part);
  FineProductSum sum(f.domain());
  for (int q = part.q_min() + 2; q <= part.q_max(); ++q) sum.add(lf.cutoff(q - 1), lg.block(q));
  return sum.project();
}

GridFunction remainder(const GridFunction& f, const GridFunction& g, const DyadicPartition& part) {
  const Localized lf(f, part);
  const Localized lg(g, part);
  FineProductSum sum(f.domain());
  for (int q = part.q_min(); q <= part.q_max(); ++q) {
    GridFunction neighbours = lg.block(q - 1) + lg.block(q) + lg.block(q + 1);
    sum.add(lf.block(q), neighbours);
  }
  return sum.project();
}

GridFunction CommutatorTerms::parts_sum() const {
  GridFunction total = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) total += parts[i];
  return total;
}

CommutatorTerms commutator_terms(const GridFunction& v, const GridFunction& u, int q,
                                 const DyadicPartition& part) {
  if (!part.contains(q)) throw RangeError("dyadic index " + std::to_string(q) + " outside the partition");
  const DomainSpec& domain = u.domain();
  const int lo = part.q_min();
  const int hi = part.q_max();

  const GridFunction ux = spatial_derivative(u);
  const GridFunction vx = spatial_derivative(v);
  const GridFunction dq_u = dyadic_block(u, q, part);
  const GridFunction dq_ux = spatial_derivative(dq_u);

  const Localized lv(v, part);
  const Localized lu(u, part);
  const Localized lux(ux, part);
  const Localized lvx(vx, part);
  const Localized ldq_ux(dq_ux, part);

  auto restrict_q = [&](const GridFunction& w) { return dyadic_block(w, q, part); };

  // R_q straight from its definition.
  const GridFunction sv = lv.cutoff(q - 1);
  GridFunction r_q = product(sv - v, dq_ux) - (restrict_q(product(v, ux)) - product(v, dq_ux));

  // R^1 = sum_{|q'-q|<=4} [S_{q'-1} v, Delta_q] d_x Delta_q' u
  FineProductSum r1_outer(domain);
  FineProductSum r1_inner(domain);
  for (int qp = std::max(lo, q - 4); qp <= std::min(hi, q + 4); ++qp) {
    const GridFunction& s = lv.cutoff(qp - 1);
    const GridFunction dqp_ux = lux.block(qp);
    r1_outer.add(s, restrict_q(dqp_ux));
    r1_inner.add(s, dqp_ux);
  }
  GridFunction r1 = r1_outer.project() - restrict_q(r1_inner.project());

  // R^2 = sum_{q'>=q-3} S_{q'-1}(d_x Delta_q u) Delta_q' v
  FineProductSum r2(domain);
  for (int qp = std::max(lo, q - 3); qp <= hi; ++qp) r2.add(ldq_ux.cutoff(qp - 1), lv.block(qp));

  // R^3 = -sum_{|q'-q|<=4} Delta_q (S_{q'-1} d_x u Delta_q' v)
  FineProductSum r3(domain);
  for (int qp = std::max(lo, q - 4); qp <= std::min(hi, q + 4); ++qp) {
    r3.add(lux.cutoff(qp - 1), lv.block(qp));
  }
  GridFunction r3_val = -restrict_q(r3.project());

  // R^4 = sum_{|q'-q|<=2, |q''-q'|<=1} d_x(Delta_q' v Delta_q Delta_q'' u)
  //     - sum_{q'>=q-3, |q''-q'|<=1} d_x Delta_q (Delta_q' v Delta_q'' u)
  // R^5 = sum_{q'>=q-3, |q''-q'|<=1} Delta_q (Delta_q' d_x v Delta_q'' u)
  //     - sum_{|q'-q|<=2, |q''-q'|<=1} Delta_q' d_x v Delta_q Delta_q'' u
  FineProductSum r4_near(domain);
  FineProductSum r4_far(domain);
  FineProductSum r5_far(domain);
  FineProductSum r5_near(domain);
  for (int qp = std::max(lo, q - 3); qp <= hi; ++qp) {
    for (int qpp = qp - 1; qpp <= qp + 1; ++qpp) {
      if (!part.contains(qpp)) continue;
      const GridFunction& uqpp = lu.block(qpp);
      r4_far.add(lv.block(qp), uqpp);
      r5_far.add(lvx.block(qp), uqpp);
      if (std::abs(qp - q) <= 2) {
        const GridFunction dq_uqpp = restrict_q(uqpp);
        r4_near.add(lv.block(qp), dq_uqpp);
        r5_near.add(lvx.block(qp), dq_uqpp);
      }
    }
  }
  GridFunction r4 = spatial_derivative(r4_near.project()) - spatial_derivative(restrict_q(r4_far.project()));
  GridFunction r5 = restrict_q(r5_far.project()) - r5_near.project();

  // R^6 = -sum_{q'>=q-1} Delta_q' v d_x Delta_q u
  FineProductSum r6(domain);
  for (int qp = std::max(lo, q - 1); qp <= hi; ++qp) r6.add(lv.block(qp), dq_ux, -1.0);

  return CommutatorTerms{std::move(r_q),
                         {std::move(r1), r2.project(), std::move(r3_val), std::move(r4), std::move(r5),
                          r6.project()}};
}

double semigroup_block_decay(const GridFunction& u, int q, const EvolutionParams& params,
                             std::span<const double> times, const DyadicPartition& part, double p) {
  params.validate();
  if (times.size() < 3) throw ParameterError("decay fit needs at least three times");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ParameterError("decay fit times must be strictly increasing");
  }
  const GridFunction block = dyadic_block(u, q, part);
  const double block_norm = lebesgue_norm(block, p);
  if (!(block_norm > 1e-13 * lebesgue_norm(u, p))) {
    throw ParameterError("block " + std::to_string(q) + " of the input is zero");
  }

  const double n = static_cast<double>(times.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (double t : times) {
    const double norm = lebesgue_norm(semigroup_apply(block, t, params), p);
    if (!(norm > 0.0)) throw NumericalError("block decayed below the representable range");
    const double y = std::log(norm);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  return -slope;
}

}  // namespace fbl
