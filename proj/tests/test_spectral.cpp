#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbl/error.hpp"
#include "fbl/profiles.hpp"
#include "fbl/spectral.hpp"

using namespace fbl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GridFunction mode(const DomainSpec& d, double k, double phase = 0.0) {
  return GridFunction::sample(d, [=](double x) { return std::sin(k * x + phase); });
}

}  // namespace

TEST(DomainSpec, RejectsBadSizes) {
  EXPECT_THROW(DomainSpec(kTwoPi, 4), ParameterError);
  EXPECT_THROW(DomainSpec(kTwoPi, 96), ParameterError);
  EXPECT_THROW(DomainSpec(0.0, 64), ParameterError);
  EXPECT_NO_THROW(DomainSpec(kTwoPi, 8));
}

TEST(DomainSpec, FrequenciesFollowTheLength) {
  const DomainSpec d(4.0 * std::numbers::pi, 64);
  EXPECT_DOUBLE_EQ(d.frequency(1), 0.5);
  EXPECT_DOUBLE_EQ(d.frequency(10), 5.0);
  // The Nyquist index stands for k = -N/2.
  EXPECT_DOUBLE_EQ(d.max_frequency(), 16.0);
  EXPECT_EQ(d.modes(), 33u);
}

TEST(GridFunction, SpectrumMatchesDirectSum) {
  const DomainSpec d(kTwoPi, 16);
  const GridFunction u = GridFunction::sample(d, [](double x) { return std::exp(std::sin(x)) + 0.3 * std::cos(5 * x); });
  for (long k = -8; k < 8; ++k) {
    Complex direct = 0.0;
    for (std::size_t j = 0; j < 16; ++j)
      direct += u[j] * std::polar(1.0, -kTwoPi * static_cast<double>(j) * static_cast<double>(k) / 16.0);
    EXPECT_NEAR(std::abs(u.coefficient(k) - direct), 0.0, 1e-12) << "k=" << k;
  }
}

TEST(GridFunction, SpectrumRoundTripAndMean) {
  const DomainSpec d(kTwoPi, 32);
  const GridFunction u = GridFunction::sample(d, [](double x) { return 2.5 + std::sin(3 * x); });
  const GridFunction back = GridFunction::from_spectrum(d, {u.spectrum().begin(), u.spectrum().end()});
  EXPECT_LT(sup_norm(back - u), 1e-14);
  EXPECT_NEAR(u.mean(), 2.5, 1e-14);
}

TEST(GridFunction, NonFiniteSamplesRaise) {
  const DomainSpec d(kTwoPi, 8);
  std::vector<double> samples(8, 0.0);
  samples[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(GridFunction(d, samples), NumericalError);
}

TEST(Spectral, DerivativeOfSine) {
  const DomainSpec d(kTwoPi, 64);
  const GridFunction du = spatial_derivative(mode(d, 3));
  const GridFunction expected = GridFunction::sample(d, [](double x) { return 3 * std::cos(3 * x); });
  EXPECT_LT(sup_norm(du - expected), 1e-12);
}

TEST(Spectral, DerivativeDropsNyquist) {
  const DomainSpec d(kTwoPi, 8);
  const GridFunction alternating = GridFunction::sample(d, [](double x) { return std::cos(4 * x); });
  EXPECT_LT(sup_norm(spatial_derivative(alternating)), 1e-15);
}

TEST(Spectral, FractionalLaplacianMeanConvention) {
  const DomainSpec d(kTwoPi, 16);
  const GridFunction c = GridFunction::constant(d, 2.0);
  EXPECT_LT(sup_norm(fractional_laplacian(c, 1.0)), 1e-15);
  // |xi|^0 = 1: Lambda^0 is the identity, mean included.
  EXPECT_LT(sup_norm(fractional_laplacian(c, 0.0) - c), 1e-15);
}

TEST(Spectral, LaplacianOfOrderTwoIsMinusSecondDerivative) {
  const DomainSpec d(3.0, 64);
  const GridFunction u = GridFunction::sample(d, [](double x) { return std::sin(kTwoPi * 2 * x / 3.0) + std::cos(kTwoPi * x / 3.0); });
  const GridFunction second = spatial_derivative(spatial_derivative(u));
  EXPECT_LT(sup_norm(fractional_laplacian(u, 2.0) + second), 1e-10);
}

TEST(Spectral, SemigroupNegativeTimeRaises) {
  const DomainSpec d(kTwoPi, 16);
  EXPECT_THROW(semigroup_apply(mode(d, 1), -1.0, {}), ParameterError);
}

TEST(Spectral, SemigroupAtOrderZeroDampsEverything) {
  const DomainSpec d(kTwoPi, 16);
  const GridFunction c = GridFunction::constant(d, 1.0);
  EXPECT_NEAR(semigroup_apply(c, 2.0, EvolutionParams{0.0, 0.5}).mean(), std::exp(-1.0), 1e-15);
}

TEST(Spectral, ParamsValidation) {
  EXPECT_THROW((EvolutionParams{2.5, 1.0}.validate()), ParameterError);
  EXPECT_THROW((EvolutionParams{1.0, -1.0}.validate()), ParameterError);
  EXPECT_NO_THROW((EvolutionParams{0.0, 0.0}.validate()));
}

TEST(Spectral, LebesgueNormsAgainstClosedForms) {
  const DomainSpec d(kTwoPi, 256);
  const GridFunction u = mode(d, 1);
  // int_0^{2pi} sin^2 = pi, int |sin| = 4, int sin^4 = 3pi/4.
  EXPECT_NEAR(lebesgue_norm(u, 2.0), std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_NEAR(lebesgue_norm(u, 1.0), 4.0, 1e-3);
  EXPECT_NEAR(lebesgue_norm(u, 4.0), std::pow(0.75 * std::numbers::pi, 0.25), 1e-12);
  EXPECT_NEAR(sup_norm(u), 1.0, 1e-3);
}

TEST(Spectral, DealiasKeepsLowerTwoThirds) {
  const DomainSpec d(kTwoPi, 64);
  const GridFunction low = mode(d, 21);   // 3*21 = 63 <= 64
  const GridFunction high = mode(d, 22);  // 3*22 > 64
  EXPECT_LT(sup_norm(dealias(low) - low), 1e-13);
  EXPECT_LT(sup_norm(dealias(high)), 1e-13);
}

TEST(Spectral, ProductIsAliasFreeBelowHalfBand) {
  const DomainSpec d(kTwoPi, 32);
  const GridFunction a = mode(d, 7);
  const GridFunction b = mode(d, 6, 0.3);
  // sin(7x) sin(6x + .3) = [cos(x - .3) - cos(13x + .3)] / 2, both below N/2.
  const GridFunction expected =
      GridFunction::sample(d, [](double x) { return 0.5 * (std::cos(x - 0.3) - std::cos(13 * x + 0.3)); });
  EXPECT_LT(sup_norm(product(a, b) - expected), 1e-13);
  // The aliased pointwise product folds mode 20 onto -12 instead.
  const GridFunction c = mode(d, 10);
  const GridFunction d2 = mode(d, 10, 0.1);
  const GridFunction exact = GridFunction::sample(d, [](double) { return 0.5 * std::cos(-0.1); });
  EXPECT_LT(sup_norm(product(c, d2) - exact), 1e-13);
  EXPECT_GT(sup_norm(pointwise_product(c, d2) - exact), 0.1);
}

TEST(Spectral, FineProductSumIsLinear) {
  const DomainSpec d(kTwoPi, 64);
  ProfileSpec spec{"random-smooth", 1.0, 3, 0.3, 20.0, 20};
  const GridFunction a = make_profile(spec, d);
  spec.seed = 4;
  const GridFunction b = make_profile(spec, d);
  spec.seed = 5;
  const GridFunction c = make_profile(spec, d);
  FineProductSum sum(d);
  sum.add(a, b, 2.0);
  sum.add(a, c, -0.5);
  EXPECT_LT(sup_norm(sum.project() - (2.0 * product(a, b) - 0.5 * product(a, c))), 1e-13);
}

TEST(Spectral, TranslateShiftsByPhase) {
  const DomainSpec d(kTwoPi, 64);
  const GridFunction u = GridFunction::sample(d, [](double x) { return std::exp(std::cos(x)); });
  const GridFunction shifted = translate(u, 0.7);
  const GridFunction expected = GridFunction::sample(d, [](double x) { return std::exp(std::cos(x - 0.7)); });
  EXPECT_LT(sup_norm(shifted - expected), 1e-12);
}

TEST(Spectral, RefinePreservesThePolynomial) {
  const DomainSpec coarse(kTwoPi, 32);
  const GridFunction u = GridFunction::sample(coarse, [](double x) { return std::sin(3 * x) + 0.2 * std::cos(9 * x); });
  const GridFunction fine = refine(u, 128);
  const GridFunction expected =
      GridFunction::sample(fine.domain(), [](double x) { return std::sin(3 * x) + 0.2 * std::cos(9 * x); });
  EXPECT_LT(sup_norm(fine - expected), 1e-13);
}

TEST(Spectral, RemoveMean) {
  const DomainSpec d(kTwoPi, 16);
  const GridFunction u = GridFunction::sample(d, [](double x) { return 4.0 + std::sin(x); });
  EXPECT_NEAR(remove_mean(u).mean(), 0.0, 1e-15);
  EXPECT_LT(sup_norm(remove_mean(u) - mode(d, 1)), 1e-14);
}
