#include "fbl/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "fbl/error.hpp"
#include "fft.hpp"

namespace fbl {

DomainSpec::DomainSpec(double length, std::size_t points) : length_(length), points_(points) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ParameterError("domain length must be positive and finite, got " + std::to_string(length));
  }
  if (points < 8 || !std::has_single_bit(points)) {
    throw ParameterError("domain points must be a power of two >= 8, got " + std::to_string(points));
  }
}

double DomainSpec::frequency(std::size_t k) const {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / length_;
}

namespace {

void require_finite(std::span<const double> samples) {
  for (double v : samples) {
    if (!std::isfinite(v)) throw NumericalError("grid function contains a non-finite sample");
  }
}

void require_same_domain(const GridFunction& a, const GridFunction& b) {
  if (!(a.domain() == b.domain())) throw ParameterError("grid functions live on different domains");
}

}  // namespace

GridFunction::GridFunction(const DomainSpec& domain, std::vector<double> samples)
    : domain_(domain), samples_(std::move(samples)), spectrum_(domain.modes()) {
  if (samples_.size() != domain_.points()) {
    throw ParameterError("sample count " + std::to_string(samples_.size()) +
                         " does not match domain points " + std::to_string(domain_.points()));
  }
  require_finite(samples_);
  detail::forward_real(samples_, spectrum_);
}

GridFunction::GridFunction(const DomainSpec& domain, std::vector<double> samples,
                           std::vector<Complex> spectrum)
    : domain_(domain), samples_(std::move(samples)), spectrum_(std::move(spectrum)) {}

GridFunction GridFunction::zeros(const DomainSpec& domain) {
  return {domain, std::vector<double>(domain.points(), 0.0), std::vector<Complex>(domain.modes())};
}

GridFunction GridFunction::constant(const DomainSpec& domain, double value) {
  return GridFunction(domain, std::vector<double>(domain.points(), value));
}

GridFunction GridFunction::from_spectrum(const DomainSpec& domain, std::vector<Complex> half_spectrum) {
  if (half_spectrum.size() != domain.modes()) {
    throw ParameterError("half spectrum must hold N/2 + 1 coefficients");
  }
  // A real signal has real mean and Nyquist coefficients.
  half_spectrum.front().imag(0.0);
  half_spectrum.back().imag(0.0);
  std::vector<double> samples(domain.points());
  detail::inverse_real(half_spectrum, samples);
  require_finite(samples);
  return {domain, std::move(samples), std::move(half_spectrum)};
}

GridFunction GridFunction::sample(const DomainSpec& domain, const std::function<double(double)>& f) {
  std::vector<double> values(domain.points());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(domain.x(i));
  return GridFunction(domain, std::move(values));
}

Complex GridFunction::coefficient(long k) const {
  const long n = static_cast<long>(domain_.points());
  if (k < -n / 2 || k >= n / 2) throw RangeError("wavenumber outside [-N/2, N/2)");
  if (k >= 0) return spectrum_[static_cast<std::size_t>(k)];
  return std::conj(spectrum_[static_cast<std::size_t>(-k)]);
}

double GridFunction::mean() const {
  return spectrum_.front().real() / static_cast<double>(domain_.points());
}

GridFunction GridFunction::operator-() const {
  GridFunction out = *this;
  out *= -1.0;
  return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_domain(*this, other);
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
  for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_[k] += other.spectrum_[k];
  require_finite(samples_);
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_domain(*this, other);
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
  for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_[k] -= other.spectrum_[k];
  require_finite(samples_);
  return *this;
}

GridFunction& GridFunction::operator*=(double factor) {
  for (double& v : samples_) v *= factor;
  for (Complex& c : spectrum_) c *= factor;
  require_finite(samples_);
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, double factor) { return a *= factor; }
GridFunction operator*(double factor, GridFunction a) { return a *= factor; }

void EvolutionParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 2.0)) {
    throw ParameterError("alpha must lie in [0, 2], got " + std::to_string(alpha));
  }
  if (!(nu >= 0.0) || !std::isfinite(nu)) {
    throw ParameterError("nu must be nonnegative, got " + std::to_string(nu));
  }
}

double abs_power(double xi, double alpha) {
  if (alpha == 0.0) return 1.0;
  return std::pow(std::abs(xi), alpha);
}

GridFunction apply_radial_multiplier(const GridFunction& u, const std::function<double(double)>& m) {
  const DomainSpec& d = u.domain();
  std::vector<Complex> spec(u.spectrum().begin(), u.spectrum().end());
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= m(d.frequency(k));
  return GridFunction::from_spectrum(d, std::move(spec));
}

GridFunction fractional_laplacian(const GridFunction& u, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 2.0)) {
    throw ParameterError("alpha must lie in [0, 2], got " + std::to_string(alpha));
  }
  return apply_radial_multiplier(u, [alpha](double xi) { return abs_power(xi, alpha); });
}

GridFunction spatial_derivative(const GridFunction& u) {
  const DomainSpec& d = u.domain();
  std::vector<Complex> spec(u.spectrum().begin(), u.spectrum().end());
  for (std::size_t k = 0; k + 1 < spec.size(); ++k) spec[k] *= Complex(0.0, d.frequency(k));
  spec.back() = 0.0;
  return GridFunction::from_spectrum(d, std::move(spec));
}

GridFunction semigroup_apply(const GridFunction& u, double t, const EvolutionParams& params) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ParameterError("semigroup time must be nonnegative, got " + std::to_string(t));
  }
  params.validate();
  if (t == 0.0) return u;
  const double rate = params.nu * t;
  const double alpha = params.alpha;
  return apply_radial_multiplier(u, [=](double xi) { return std::exp(-rate * abs_power(xi, alpha)); });
}

double lebesgue_norm(const GridFunction& u, double p) {
  if (!(p >= 1.0)) throw ParameterError("Lebesgue exponent must be >= 1, got " + std::to_string(p));
  if (std::isinf(p)) return sup_norm(u);
  const double dx = u.domain().dx();
  double sum = 0.0;
  if (p == 1.0) {
    for (double v : u.samples()) sum += std::abs(v);
    return dx * sum;
  }
  if (p == 2.0) {
    for (double v : u.samples()) sum += v * v;
    return std::sqrt(dx * sum);
  }
  for (double v : u.samples()) sum += std::pow(std::abs(v), p);
  return std::pow(dx * sum, 1.0 / p);
}

double sup_norm(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.samples()) m = std::max(m, std::abs(v));
  return m;
}

GridFunction dealias(const GridFunction& u) {
  const std::size_t n = u.domain().points();
  std::vector<Complex> spec(u.spectrum().begin(), u.spectrum().end());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (3 * k > n) spec[k] = 0.0;
  }
  return GridFunction::from_spectrum(u.domain(), std::move(spec));
}

GridFunction pointwise_product(const GridFunction& a, const GridFunction& b) {
  require_same_domain(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return GridFunction(a.domain(), std::move(out));
}

GridFunction translate(const GridFunction& u, double shift) {
  const DomainSpec& d = u.domain();
  std::vector<Complex> spec(u.spectrum().begin(), u.spectrum().end());
  for (std::size_t k = 0; k + 1 < spec.size(); ++k) {
    spec[k] *= std::polar(1.0, -d.frequency(k) * shift);
  }
  spec.back() *= std::cos(d.max_frequency() * shift);
  return GridFunction::from_spectrum(d, std::move(spec));
}

GridFunction refine(const GridFunction& u, std::size_t points) {
  const DomainSpec& coarse = u.domain();
  if (points < coarse.points()) throw ParameterError("refine cannot reduce the number of points");
  const DomainSpec fine(coarse.length(), points);
  if (points == coarse.points()) return u;
  const double scale = static_cast<double>(points) / static_cast<double>(coarse.points());
  std::vector<Complex> spec(fine.modes());
  const std::size_t nyq = coarse.points() / 2;
  for (std::size_t k = 0; k < nyq; ++k) spec[k] = scale * u.spectrum()[k];
  spec[nyq] = 0.5 * scale * u.spectrum()[nyq].real();
  return GridFunction::from_spectrum(fine, std::move(spec));
}

GridFunction remove_mean(const GridFunction& u) {
  std::vector<Complex> spec(u.spectrum().begin(), u.spectrum().end());
  spec.front() = 0.0;
  return GridFunction::from_spectrum(u.domain(), std::move(spec));
}

FineProductSum::FineProductSum(const DomainSpec& domain)
    : domain_(domain), accumulator_(2 * domain.points(), 0.0) {}

std::vector<double> FineProductSum::fine_samples(const GridFunction& u) const {
  if (!(u.domain() == domain_)) throw ParameterError("grid functions live on different domains");
  const std::size_t n = domain_.points();
  std::vector<Complex> spec(n + 1);
  for (std::size_t k = 0; k < n / 2; ++k) spec[k] = 2.0 * u.spectrum()[k];
  spec[n / 2] = u.spectrum()[n / 2].real();
  std::vector<double> out(2 * n);
  detail::inverse_real(spec, out);
  return out;
}

void FineProductSum::add(const GridFunction& a, const GridFunction& b, double weight) {
  const std::vector<double> fa = fine_samples(a);
  const std::vector<double> fb = fine_samples(b);
  for (std::size_t i = 0; i < accumulator_.size(); ++i) accumulator_[i] += weight * fa[i] * fb[i];
}

GridFunction FineProductSum::project() const {
  const std::size_t n = domain_.points();
  std::vector<Complex> fine(n + 1);
  detail::forward_real(accumulator_, fine);
  std::vector<Complex> spec(domain_.modes());
  for (std::size_t k = 0; k < n / 2; ++k) spec[k] = 0.5 * fine[k];
  spec[n / 2] = 0.0;
  return GridFunction::from_spectrum(domain_, std::move(spec));
}

GridFunction product(const GridFunction& a, const GridFunction& b) {
  FineProductSum sum(a.domain());
  sum.add(a, b);
  return sum.project();
}

}  // namespace fbl
