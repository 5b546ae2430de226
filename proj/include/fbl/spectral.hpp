#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fbl {

using Complex = std::complex<double>;

/// Uniform periodic grid on [0, L) with N points, N >= 8 a power of two.
///
/// The continuous problem lives on the real line; a large periodic box is
/// used as a surrogate so that every Fourier multiplier is applied exactly.
class DomainSpec {
 public:
  DomainSpec(double length, std::size_t points);

  double length() const { return length_; }
  std::size_t points() const { return points_; }
  double dx() const { return length_ / static_cast<double>(points_); }
  double x(std::size_t i) const { return static_cast<double>(i) * dx(); }

  /// Number of stored half-spectrum coefficients, N/2 + 1.
  std::size_t modes() const { return points_ / 2 + 1; }

  /// Physical frequency |2 pi k / L| of half-spectrum index k.  Index N/2
  /// is the Nyquist mode k = -N/2.
  double frequency(std::size_t k) const;

  /// Largest resolved |2 pi k / L|, i.e. the Nyquist frequency pi N / L.
  double max_frequency() const { return frequency(points_ / 2); }

  bool operator==(const DomainSpec&) const = default;

 private:
  double length_;
  std::size_t points_;
};

/// Real function sampled on a DomainSpec together with its discrete Fourier
/// transform.
///
/// Fourier convention (the only one used in the project):
///   hat u_k = sum_j u_j exp(-2 pi i j k / N),   u_j = (1/N) sum_k hat u_k exp(2 pi i j k / N),
/// with k in [-N/2, N/2).  Only the half spectrum k = 0..N/2 is stored; the
/// negative modes follow from Hermitian symmetry, hat u_{-k} = conj(hat u_k).
/// Mode k carries the physical frequency xi = 2 pi k / L, and every
/// multiplier m(xi) acts by hat u_k -> m(2 pi k / L) hat u_k.
///
/// Values are immutable; both representations are computed at construction.
/// Non-finite samples raise NumericalError.
class GridFunction {
 public:
  GridFunction(const DomainSpec& domain, std::vector<double> samples);

  static GridFunction zeros(const DomainSpec& domain);
  static GridFunction constant(const DomainSpec& domain, double value);
  static GridFunction from_spectrum(const DomainSpec& domain, std::vector<Complex> half_spectrum);
  static GridFunction sample(const DomainSpec& domain, const std::function<double(double)>& f);

  const DomainSpec& domain() const { return domain_; }
  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// Half spectrum, N/2 + 1 unnormalized coefficients.
  std::span<const Complex> spectrum() const { return spectrum_; }

  /// Coefficient of wavenumber k in [-N/2, N/2).
  Complex coefficient(long k) const;

  double mean() const;

  GridFunction operator-() const;
  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double factor);

 private:
  GridFunction(const DomainSpec& domain, std::vector<double> samples,
               std::vector<Complex> spectrum);

  DomainSpec domain_;
  std::vector<double> samples_;
  std::vector<Complex> spectrum_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, double factor);
GridFunction operator*(double factor, GridFunction a);

/// Dissipation order and viscosity of nu Lambda^alpha.
struct EvolutionParams {
  double alpha = 1.0;
  double nu = 1.0;

  /// Throws ParameterError unless 0 <= alpha <= 2 and nu >= 0.
  void validate() const;
};

/// |xi|^alpha with the convention 0^0 = 1.
double abs_power(double xi, double alpha);

/// Multiplies mode k by m(|2 pi k / L|).  The multiplier must be real and
/// even in xi.
GridFunction apply_radial_multiplier(const GridFunction& u, const std::function<double(double)>& m);

/// Lambda^alpha u: mode k times |2 pi k / L|^alpha.  The mean mode is kept
/// for alpha = 0 and annihilated for alpha > 0.
GridFunction fractional_laplacian(const GridFunction& u, double alpha);

/// d/dx u: mode k times i 2 pi k / L; the Nyquist mode is dropped.
GridFunction spatial_derivative(const GridFunction& u);

/// exp(-t nu Lambda^alpha) u, exact in Fourier space.
GridFunction semigroup_apply(const GridFunction& u, double t, const EvolutionParams& params);

/// (dx sum |u_i|^p)^(1/p) for finite p, max |u_i| for p = infinity.
double lebesgue_norm(const GridFunction& u, double p);
double sup_norm(const GridFunction& u);

/// 2/3 rule: zero every mode with |k| > N/3.
GridFunction dealias(const GridFunction& u);

/// Pointwise product on the base grid (aliased).
GridFunction pointwise_product(const GridFunction& a, const GridFunction& b);

/// Translation u(x - shift) by a spectral phase shift.
GridFunction translate(const GridFunction& u, double shift);

/// Zero-padded transfer to a grid with more points; the represented
/// trigonometric polynomial is unchanged.
GridFunction refine(const GridFunction& u, std::size_t points);

/// u minus its mean.
GridFunction remove_mean(const GridFunction& u);

/// Accumulates sum_i w_i a_i b_i on a grid with twice the points, where the
/// product of two base-grid functions is represented without aliasing, and
/// projects the sum back onto the base grid (modes |k| < N/2; the Nyquist
/// mode of the result is zero).
class FineProductSum {
 public:
  explicit FineProductSum(const DomainSpec& domain);

  void add(const GridFunction& a, const GridFunction& b, double weight = 1.0);
  GridFunction project() const;

 private:
  std::vector<double> fine_samples(const GridFunction& u) const;

  DomainSpec domain_;
  std::vector<double> accumulator_;
};

/// Alias-free product a * b projected onto the base grid.
GridFunction product(const GridFunction& a, const GridFunction& b);

}  // namespace fbl
