#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rsi/forward/forward.hpp"

namespace rsi {

enum class Provenance : std::uint8_t {
  kMonteCarlo = 0,
  kExactHomogeneous = 1,
  kExactInhomogeneous = 2,
  kPerturbed = 3,
};

const char* provenance_name(Provenance p);

/// Second moments of Cauchy data over node pairs, without conjugation:
///   F1(i,j) = E[u(x_i) u(x_j)], F2(i,j) = E[u(x_i) dnu(x_j)],
///   F3(i,j) = E[dnu(x_i) dnu(x_j)].
/// Matrices are n x n, row-major.
struct CorrelationSet {
  std::shared_ptr<const SphereQuadrature> sphere;
  double k = 0.0;
  std::vector<Complex> f1, f2, f3;
  std::uint64_t n_realizations = 0;
  double M = 0.0;
  Provenance provenance = Provenance::kMonteCarlo;

  std::size_t n() const { return sphere ? sphere->size() : 0; }
  /// Zero matrices on the given sphere.
  static CorrelationSet zeros(std::shared_ptr<const SphereQuadrature> sphere,
                              double k);
};

/// max_j sqrt(sum_il w_i w_l |F_j(i,l)|^2).
double compute_M(const CorrelationSet& cs);

/// Weighted L2(dB_R x dB_R) norm of one n x n kernel matrix.
double kernel_norm(const std::vector<Complex>& f, const SphereQuadrature& sq);

/// Running sums of u u^T, u dnu^T and dnu dnu^T with compensated addition, and
/// optionally the per-entry squares of real and imaginary parts for standard
/// errors. Partial accumulators merge associatively.
class CorrelationAccumulator {
 public:
  CorrelationAccumulator(std::shared_ptr<const SphereQuadrature> sphere,
                         double k, bool track_moments = false);

  /// Throws DomainError for a foreign sphere or a medium tag that differs from
  /// earlier data.
  void add(const CauchyData& data);
  void merge(const CorrelationAccumulator& other);

  std::uint64_t count() const { return count_; }
  bool tracks_moments() const { return track_; }

  /// Sample means. Throws DomainError when nothing was accumulated.
  CorrelationSet finalize() const;

  /// Per-entry standard errors of the sample means, real and imaginary parts
  /// packed as (SE of Re, SE of Im). Requires moments and count >= 2.
  struct StandardErrors {
    std::vector<Complex> f1, f2, f3;
  };
  StandardErrors standard_errors() const;

 private:
  struct Sum {
    std::vector<Complex> value, comp, squares;
  };
  void merge_sum(Sum& into, const Sum& from) const;

  std::shared_ptr<const SphereQuadrature> sphere_;
  double k_;
  bool track_;
  std::uint64_t count_ = 0;
  int medium_ = -1;
  Sum s1_, s2_, s3_;
};

/// Correlations from n realizations with streams first_stream .. +n-1 of the
/// given seed, split into contiguous per-thread ranges merged in order. With
/// threads = 1 the result is bitwise reproducible; other thread counts agree
/// to rounding of the compensated sums.
CorrelationAccumulator monte_carlo_correlations(const BoundaryOperator& op,
                                                const TetMesh& mesh,
                                                std::uint64_t n_realizations,
                                                std::uint64_t seed,
                                                int threads = 1,
                                                bool track_moments = false,
                                                std::uint64_t first_stream = 0);

/// Itô-isometry oracle: F1 = sum_m |K_m| mu(c_m) G(x_i, c_m) G(x_j, c_m), and
/// likewise with normal derivatives.
CorrelationSet exact_correlations_homogeneous(
    const TetMesh& mesh, const StrengthField& field,
    std::shared_ptr<const SphereQuadrature> sphere, double k);

/// Same with the medium-perturbed kernel columns (one factorization, all
/// source columns as right-hand sides).
CorrelationSet exact_correlations_inhomogeneous(
    const TetMesh& mesh, const StrengthField& field, const MediumField& medium,
    std::shared_ptr<const SphereQuadrature> sphere, double k);

/// Oracle assembled from an operator's kernel columns, with per-column
/// variance |K_j| of the driving increments.
CorrelationSet exact_correlations(const BoundaryOperator& op,
                                  const TetMesh& mesh);

/// Adds independent complex Gaussian kernels, symmetrized for F1 and F3, each
/// normalized to weighted norm eps. Throws DomainError for eps < 0.
CorrelationSet perturb(const CorrelationSet& cs, double eps,
                       std::uint64_t seed);

/// cs1 + alpha cs2 (same sphere); provenance of cs1, M recomputed.
CorrelationSet axpy(const CorrelationSet& cs1, Complex alpha,
                    const CorrelationSet& cs2);

}  // namespace rsi
