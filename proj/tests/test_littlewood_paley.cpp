#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fbl/error.hpp"
#include "fbl/littlewood_paley.hpp"
#include "fbl/profiles.hpp"

using namespace fbl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Partition written out from its definition, independent of the library:
// chi(xi) = g(1-t) / (g(t) + g(1-t)) with t = (|xi| - 3/4) / (4/3 - 3/4), g(t) = exp(-1/t).
double ref_chi(double xi) {
  const double t = (std::fabs(xi) - 0.75) / (4.0 / 3.0 - 0.75);
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}
double ref_phi(double xi) { return ref_chi(xi / 2.0) - ref_chi(xi); }

GridFunction random_smooth(const DomainSpec& d, std::uint64_t seed, int modes = 40) {
  return remove_mean(make_profile(ProfileSpec{"random-smooth", 1.0, seed, 0.3, 20.0, modes}, d));
}

}  // namespace

TEST(SmoothStep, EndpointsAndSymmetry) {
  EXPECT_EQ(smooth_step(-0.1), 1.0);
  EXPECT_EQ(smooth_step(0.0), 1.0);
  EXPECT_EQ(smooth_step(1.0), 0.0);
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-15);
  for (double t : {0.1, 0.27, 0.63, 0.9}) EXPECT_NEAR(smooth_step(t) + smooth_step(1.0 - t), 1.0, 1e-15);
}

TEST(DyadicPartition, ChiAndPhiMatchTheDefinition) {
  for (double xi = 0.0; xi < 6.0; xi += 0.0137) {
    EXPECT_NEAR(DyadicPartition::chi(xi), ref_chi(xi), 1e-15);
    EXPECT_NEAR(DyadicPartition::phi(xi), ref_phi(xi), 1e-15);
  }
  EXPECT_EQ(DyadicPartition::chi(0.75), 1.0);
  EXPECT_EQ(DyadicPartition::chi(4.0 / 3.0), 0.0);
  EXPECT_EQ(DyadicPartition::phi(0.7), 0.0);
  EXPECT_EQ(DyadicPartition::phi(2.7), 0.0);
}

TEST(DyadicPartition, IndexRangeOnStandardGrids) {
  const DyadicPartition small(DomainSpec(kTwoPi, 8));
  EXPECT_EQ(small.q_min(), -1);
  EXPECT_EQ(small.q_max(), 2);
  const DyadicPartition large(DomainSpec(kTwoPi, 1024));
  EXPECT_EQ(large.q_min(), -1);
  EXPECT_EQ(large.q_max(), 9);
  EXPECT_EQ(large.shells(), 11);
}

TEST(DyadicPartition, TruncatedSumIsOneOnEveryMode) {
  for (double length : {kTwoPi, 1.0, 50.0}) {
    const DomainSpec d(length, 256);
    const DyadicPartition part(d);
    for (std::size_t k = 1; k < d.modes(); ++k) {
      double sum = 0.0;
      for (int q = part.q_min(); q <= part.q_max(); ++q) sum += ref_phi(std::ldexp(d.frequency(k), -q));
      EXPECT_NEAR(sum, 1.0, 1e-14) << "L=" << length << " k=" << k;
    }
  }
}

TEST(DyadicBlock, OutOfRangeRaises) {
  const DomainSpec d(kTwoPi, 64);
  const DyadicPartition part(d);
  const GridFunction u = random_smooth(d, 1);
  EXPECT_THROW(dyadic_block(u, part.q_max() + 1, part), RangeError);
  EXPECT_THROW(dyadic_block(u, part.q_min() - 1, part), RangeError);
  EXPECT_THROW(low_cutoff(u, part.q_max() + 2, part), RangeError);
}

TEST(DyadicBlock, SingleModeIsScaledByPhi) {
  const DomainSpec d(kTwoPi, 128);
  const DyadicPartition part(d);
  const GridFunction u = GridFunction::sample(d, [](double x) { return std::sin(5 * x); });
  for (int q = part.q_min(); q <= part.q_max(); ++q)
    EXPECT_LT(sup_norm(dyadic_block(u, q, part) - ref_phi(std::ldexp(5.0, -q)) * u), 1e-14);
}

TEST(DyadicBlock, ReconstructionAndQuasiOrthogonality) {
  const DomainSpec d(kTwoPi, 256);
  const DyadicPartition part(d);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GridFunction u = random_smooth(d, seed, 100);
    const BlockDecomposition blocks = decompose(u, part);
    EXPECT_LT(sup_norm(blocks.sum() - u), 1e-13 * sup_norm(u));
    for (int q = part.q_min(); q <= part.q_max(); ++q)
      for (int qp = part.q_min(); qp <= part.q_max(); ++qp)
        if (std::abs(q - qp) >= 2) {
          EXPECT_EQ(sup_norm(dyadic_block(blocks.block(q), qp, part)), 0.0);
        }
  }
}

TEST(LowCutoff, EqualsChiMultiplierOnMeanFreeData) {
  const DomainSpec d(kTwoPi, 256);
  const DyadicPartition part(d);
  const GridFunction u = random_smooth(d, 7, 100);
  for (int q = part.q_min(); q <= part.q_max() + 1; ++q) {
    const GridFunction expected = apply_radial_multiplier(u, [q](double xi) {
      return xi == 0.0 ? 0.0 : ref_chi(std::ldexp(xi, -q));
    });
    EXPECT_LT(sup_norm(low_cutoff(u, q, part) - expected), 1e-13) << "q=" << q;
  }
  EXPECT_LT(sup_norm(low_cutoff(u, part.q_max() + 1, part) - u), 1e-13);
  EXPECT_EQ(sup_norm(low_cutoff(u, part.q_min(), part)), 0.0);
}

TEST(Bernstein, L2RatiosStayInTheShell) {
  // For p = 2, Parseval pins ||d_x Delta_q u|| / (2^q ||Delta_q u||) inside [3/4, 8/3].
  const DomainSpec d(kTwoPi, 512);
  const DyadicPartition part(d);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GridFunction u = random_smooth(d, seed, 200);
    for (int q = part.q_min(); q <= part.q_max(); ++q) {
      const GridFunction b = dyadic_block(u, q, part);
      const double base = lebesgue_norm(b, 2.0);
      if (base == 0.0) continue;
      const double ratio = lebesgue_norm(spatial_derivative(b), 2.0) / (std::exp2(q) * base);
      EXPECT_GE(ratio, 0.75 - 1e-12);
      EXPECT_LE(ratio, 8.0 / 3.0 + 1e-12);
    }
  }
}

TEST(Bernstein, SupNormConstantIsUniformAcrossShells) {
  // ||d_x Delta_q u||_inf <= C 2^q ||Delta_q u||_inf with C independent of q.
  // Narrow bumps excite every shell; the largest ratio per shell must stay
  // within a factor two of the overall largest one.
  const DomainSpec d(kTwoPi, 1024);
  const DyadicPartition part(d);
  std::vector<double> per_shell(static_cast<std::size_t>(part.shells()), 0.0);
  for (double width : {0.01, 0.015, 0.02}) {
    ProfileSpec spec{"gaussian-bump", 1.0, 11, width, 20.0, 8};
    const GridFunction u = remove_mean(make_profile(spec, d));
    for (int q = part.q_min(); q <= part.q_max() - 1; ++q) {
      const GridFunction b = dyadic_block(u, q, part);
      const double ratio = sup_norm(spatial_derivative(b)) / (std::exp2(q) * sup_norm(b));
      auto& slot = per_shell[static_cast<std::size_t>(q - part.q_min())];
      slot = std::max(slot, ratio);
    }
  }
  per_shell.pop_back();  // top shell is cut by the Nyquist frequency
  const double c_b = *std::max_element(per_shell.begin(), per_shell.end());
  EXPECT_LT(c_b, 8.0 / 3.0 * 2.0);
  for (double r : per_shell) EXPECT_GE(r, c_b / 2.0);
}

TEST(BesovNorm, SingleModeAgainstClosedForm) {
  const DomainSpec d(kTwoPi, 128);
  const DyadicPartition part(d);
  const GridFunction u = GridFunction::sample(d, [](double x) { return std::sin(5 * x); });
  for (const BesovSpec spec : {BesovSpec{0.5, 2.0, 1.0}, BesovSpec{1.0, 2.0, 2.0}, BesovSpec{-0.3, 2.0, 3.0}}) {
    double sum = 0.0;
    for (int q = part.q_min(); q <= part.q_max(); ++q)
      sum += std::pow(std::exp2(q * spec.s) * ref_phi(std::ldexp(5.0, -q)) * std::sqrt(std::numbers::pi), spec.r);
    EXPECT_NEAR(besov_norm(u, spec, part), std::pow(sum, 1.0 / spec.r), 1e-12);
  }
  double top = 0.0;
  for (int q = part.q_min(); q <= part.q_max(); ++q)
    top = std::max(top, std::exp2(q * 0.5) * ref_phi(std::ldexp(5.0, -q)));
  EXPECT_NEAR(besov_norm(u, BesovSpec{0.5, std::numeric_limits<double>::infinity(),
                                      std::numeric_limits<double>::infinity()}, part),
              top, 1e-3);
}

TEST(BesovNorm, RejectsNonZeroMeanAndBadSpecs) {
  const DomainSpec d(kTwoPi, 64);
  const DyadicPartition part(d);
  const GridFunction shifted = GridFunction::sample(d, [](double x) { return 1.0 + std::sin(x); });
  EXPECT_THROW(besov_norm(shifted, BesovSpec{}, part), ParameterError);
  EXPECT_THROW(besov_norm(remove_mean(shifted), BesovSpec{0.0, 0.5, 1.0}, part), ParameterError);
  EXPECT_NO_THROW(besov_norm(remove_mean(shifted), BesovSpec{}, part));
}

TEST(BesovNorm, ReportFlagsTopShell) {
  const DomainSpec d(kTwoPi, 64);
  const DyadicPartition part(d);
  const GridFunction high = GridFunction::sample(d, [](double x) { return std::sin(31 * x); });
  const GridFunction low = GridFunction::sample(d, [](double x) { return std::sin(3 * x); });
  const BesovNormReport r = besov_norm_report(high, BesovSpec{}, part);
  // With s = 0 and r = 1, sin 31x splits between the top two shells as phi(31/32) : phi(31/16).
  const double top = ref_phi(std::ldexp(31.0, -part.q_max()));
  const double below = ref_phi(std::ldexp(31.0, 1 - part.q_max()));
  EXPECT_NEAR(r.top_shell_share, top / (top + below), 1e-12);
  EXPECT_LT(besov_norm_report(low, BesovSpec{}, part).top_shell_share, 1e-14);
  EXPECT_EQ(r.q_min, part.q_min());
  EXPECT_EQ(r.q_max, part.q_max());
}

TEST(SpacetimeNorm, ConstantSeriesAndMinkowskiOrdering) {
  const DomainSpec d(kTwoPi, 128);
  const DyadicPartition part(d);
  const GridFunction u = random_smooth(d, 3, 30);
  const BesovSpec spec{0.5, 2.0, 1.0};
  const double b = besov_norm(u, spec, part);
  std::vector<Snapshot> constant = {{0.0, u}, {0.5, u}, {2.0, u}};
  EXPECT_NEAR(spacetime_besov_norm(constant, spec, std::numeric_limits<double>::infinity(),
                                   SpacetimeVariant::tilde, part), b, 1e-12);
  EXPECT_NEAR(spacetime_besov_norm(constant, spec, 1.0, SpacetimeVariant::plain, part), 2.0 * b, 1e-12);
  EXPECT_NEAR(spacetime_besov_norm(constant, spec, 1.0, SpacetimeVariant::tilde, part), 2.0 * b, 1e-12);

  std::vector<Snapshot> decaying;
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.05 * i;
    decaying.push_back({t, semigroup_apply(u, t, EvolutionParams{1.0, 1.0})});
  }
  // rho >= r: plain <= tilde; rho <= r: plain >= tilde.
  const BesovSpec r1{0.5, 2.0, 1.0};
  EXPECT_LE(spacetime_besov_norm(decaying, r1, 2.0, SpacetimeVariant::plain, part),
            spacetime_besov_norm(decaying, r1, 2.0, SpacetimeVariant::tilde, part) * (1 + 1e-14));
  const BesovSpec r3{0.5, 2.0, 3.0};
  EXPECT_GE(spacetime_besov_norm(decaying, r3, 1.0, SpacetimeVariant::plain, part) * (1 + 1e-14),
            spacetime_besov_norm(decaying, r3, 1.0, SpacetimeVariant::tilde, part));
}

TEST(SpacetimeNorm, InputValidation) {
  const DomainSpec d(kTwoPi, 64);
  const DyadicPartition part(d);
  const GridFunction u = random_smooth(d, 1, 10);
  const std::vector<Snapshot> one = {{0.0, u}};
  EXPECT_THROW(spacetime_besov_norm(one, BesovSpec{}, 2.0, SpacetimeVariant::plain, part), ParameterError);
  const std::vector<Snapshot> unordered = {{1.0, u}, {0.5, u}};
  EXPECT_THROW(spacetime_besov_norm(unordered, BesovSpec{}, 2.0, SpacetimeVariant::plain, part), ParameterError);
}

TEST(Bony, ProductSplitsExactly) {
  const DomainSpec d(kTwoPi, 256);
  const DyadicPartition part(d);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GridFunction f = random_smooth(d, 2 * seed, 120);
    const GridFunction g = random_smooth(d, 2 * seed + 1, 120);
    const GridFunction rebuilt = paraproduct(f, g, part) + paraproduct(g, f, part) + remainder(f, g, part);
    EXPECT_LT(sup_norm(product(f, g) - rebuilt), 1e-13 * sup_norm(product(f, g)));
  }
}

TEST(Commutator, SixTermsRebuildTheRemainder) {
  const DomainSpec d(kTwoPi, 256);
  const DyadicPartition part(d);
  const GridFunction v = random_smooth(d, 21, 120);
  const GridFunction u = random_smooth(d, 22, 120);
  const double scale = sup_norm(v) * sup_norm(spatial_derivative(u));
  for (int q = part.q_min(); q <= part.q_max(); ++q) {
    const CommutatorTerms t = commutator_terms(v, u, q, part);
    EXPECT_LT(sup_norm(t.r_q - t.parts_sum()), 1e-13 * scale) << "q=" << q;
  }
}

TEST(Commutator, ConstantVelocityClosedForm) {
  // S_{q-1} c = 0 on the homogeneous blocks and [Delta_q, c d_x] = 0, so R_q = -c d_x Delta_q u.
  const DomainSpec d(kTwoPi, 128);
  const DyadicPartition part(d);
  const GridFunction c = GridFunction::constant(d, 0.7);
  const GridFunction u = random_smooth(d, 5, 50);
  for (int q = part.q_min(); q <= part.q_max(); ++q) {
    const CommutatorTerms t = commutator_terms(c, u, q, part);
    EXPECT_LT(sup_norm(t.r_q + 0.7 * spatial_derivative(dyadic_block(u, q, part))), 1e-12);
  }
}

TEST(BlockDecay, SingleModeRateIsExact) {
  const DomainSpec d(kTwoPi, 128);
  const DyadicPartition part(d);
  const GridFunction u = GridFunction::sample(d, [](double x) { return std::cos(6 * x); });
  const std::vector<double> times = {0.0, 0.01, 0.02, 0.05};
  for (double alpha : {0.5, 1.0, 2.0}) {
    const EvolutionParams params{alpha, 0.8};
    EXPECT_NEAR(semigroup_block_decay(u, 2, params, times, part), 0.8 * std::pow(6.0, alpha), 1e-9);
  }
}

TEST(BlockDecay, EmptyBlockRaises) {
  const DomainSpec d(kTwoPi, 128);
  const DyadicPartition part(d);
  const GridFunction u = GridFunction::sample(d, [](double x) { return std::cos(6 * x); });
  const std::vector<double> times = {0.0, 0.01, 0.02};
  EXPECT_THROW(semigroup_block_decay(u, 5, EvolutionParams{}, times, part), Error);
}
