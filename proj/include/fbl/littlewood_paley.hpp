#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "fbl/spectral.hpp"

namespace fbl {

/// Smooth step, 1 for t <= 0 and 0 for t >= 1, built from exp(-1/t).
double smooth_step(double t);

/// Radial dyadic partition (chi, phi) attached to a grid.
///
/// chi == 1 on |xi| <= 3/4 and chi == 0 on |xi| >= 4/3; phi(xi) = chi(xi/2) - chi(xi),
/// so phi is supported in 3/4 <= |xi| <= 8/3 and the partition identities
/// telescope.  The homogeneous blocks are truncated to [q_min, q_max], the
/// smallest range for which sum_q phi(2^-q xi) = 1 at every nonzero grid
/// frequency; the mean mode is never part of any block.
class DyadicPartition {
 public:
  /// Throws ConfigurationError when fewer than three shells are resolvable.
  explicit DyadicPartition(const DomainSpec& domain);

  const DomainSpec& domain() const { return domain_; }
  int q_min() const { return q_min_; }
  int q_max() const { return q_max_; }
  int shells() const { return q_max_ - q_min_ + 1; }
  bool contains(int q) const { return q >= q_min_ && q <= q_max_; }

  static double chi(double xi);
  static double phi(double xi);

  /// phi(2^-q xi).
  static double block_weight(int q, double xi);

  /// Multiplier of the low cutoff S_q: sum of block weights j = q_min..q-1.
  double cutoff_weight(int q, double xi) const;

 private:
  DomainSpec domain_;
  int q_min_;
  int q_max_;
};

/// (s, p, r) of the homogeneous Besov norm; p, r in [1, inf].
struct BesovSpec {
  double s = 0.0;
  double p = 2.0;
  double r = 1.0;

  void validate() const;
};

/// Delta_q u = phi(2^-q D) u.  Throws RangeError for q outside the partition.
GridFunction dyadic_block(const GridFunction& u, int q, const DyadicPartition& part);

/// S_q u = sum_{q_min <= j <= q-1} Delta_j u, defined for q in [q_min, q_max + 1].
GridFunction low_cutoff(const GridFunction& u, int q, const DyadicPartition& part);

/// Every block Delta_q u for q in [q_min, q_max].
struct BlockDecomposition {
  int q_min = 0;
  std::vector<GridFunction> blocks;

  const GridFunction& block(int q) const { return blocks.at(static_cast<std::size_t>(q - q_min)); }
  int q_max() const { return q_min + static_cast<int>(blocks.size()) - 1; }
  GridFunction sum() const;
};

BlockDecomposition decompose(const GridFunction& u, const DyadicPartition& part);

/// Truncated homogeneous Besov norm over [q_min, q_max].  Input must be mean
/// zero (relative to its sup norm); otherwise ParameterError.
double besov_norm(const GridFunction& u, const BesovSpec& spec, const DyadicPartition& part);

/// The norm together with the truncation it was computed under.
struct BesovNormReport {
  double value = 0.0;
  int q_min = 0;
  int q_max = 0;
  /// Share of the q-sum carried by the top shell; large values signal that
  /// the truncation at q_max is not harmless.
  double top_shell_share = 0.0;
};

BesovNormReport besov_norm_report(const GridFunction& u, const BesovSpec& spec,
                                  const DyadicPartition& part);

/// One stored solution state.
struct Snapshot {
  double t = 0.0;
  GridFunction u;
};

enum class SpacetimeVariant { plain, tilde };

/// L^rho_T B (plain: time norm of the Besov norm) or tilde-L^rho_T B (q-sum of
/// per-block time norms).  Time integrals use the trapezoidal rule over the
/// stored snapshots; rho = inf takes the maximum over them.
double spacetime_besov_norm(std::span<const Snapshot> series, const BesovSpec& spec, double rho,
                            SpacetimeVariant variant, const DyadicPartition& part);

/// Bony paraproduct T_f g = sum_q' S_{q'-1} f Delta_q' g, alias-free products.
GridFunction paraproduct(const GridFunction& f, const GridFunction& g, const DyadicPartition& part);

/// Bony remainder R(f, g) = sum_q' Delta_q' f (Delta_{q'-1} g + Delta_q' g + Delta_{q'+1} g).
GridFunction remainder(const GridFunction& f, const GridFunction& g, const DyadicPartition& part);

/// The commutator remainder R_q = (S_{q-1} v - v) d_x Delta_q u - [Delta_q, v d_x] u,
/// evaluated directly, together with its six-term Bony splitting.
struct CommutatorTerms {
  GridFunction r_q;
  std::array<GridFunction, 6> parts;

  GridFunction parts_sum() const;
};

CommutatorTerms commutator_terms(const GridFunction& v, const GridFunction& u, int q,
                                 const DyadicPartition& part);

/// Least-squares decay rate of log ||Delta_q exp(-t nu Lambda^alpha) u||_{L^p}
/// against t, returned as a positive number.  `times` must be strictly
/// increasing with at least three entries.
double semigroup_block_decay(const GridFunction& u, int q, const EvolutionParams& params,
                             std::span<const double> times, const DyadicPartition& part,
                             double p = 2.0);

}  // namespace fbl
