#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rsi/fields/fields.hpp"
#include "rsi/fields/noise.hpp"
#include "rsi/geometry/mesh.hpp"
#include "rsi/geometry/quadrature.hpp"

namespace rsi {

enum class MediumTag : std::uint8_t { kHomogeneous = 0, kInhomogeneous = 1 };

/// Wave field u and its normal derivative at the nodes of a measurement
/// sphere, for one noise realization (or one deterministic source).
struct CauchyData {
  std::shared_ptr<const SphereQuadrature> sphere;
  std::vector<Complex> u;
  std::vector<Complex> dnu;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  MediumTag medium = MediumTag::kHomogeneous;

  /// Throws DomainError on length mismatch or non-finite entries.
  void validate() const;
};

/// Indices of tetrahedra whose centroid value is nonzero.
std::vector<std::size_t> strength_support(const TetMesh& mesh,
                                          const StrengthField& field);
std::vector<std::size_t> medium_support(const TetMesh& mesh,
                                        const MediumField& medium);

/// Green's function between centroids with the self-cell average on the
/// diagonal: G(c_i, c_j) for i != j and self_cell_integral / |K_i| for i == j.
Complex centroid_green(const TetMesh& mesh, double k, std::size_t i,
                       std::size_t j);

/// Dense collocation form of u + k^2 G[q u] = u0 on the tet centroids.
///
/// Only columns with q(c_j) != 0 differ from the identity, so the full system
/// is block lower-triangular in (scatterer, rest) ordering. The scatterer
/// block is factorized with partial-pivoting LU; rows outside it are explicit.
class LippmannSchwingerSystem {
 public:
  LippmannSchwingerSystem(const TetMesh& mesh, const MediumField& medium,
                          double k);

  double k() const { return k_; }
  double q_sup() const { return q_sup_; }
  /// Tets with q(c_j) != 0, in increasing order.
  const std::vector<std::size_t>& scatterers() const { return scatterers_; }
  /// Scatterer block of A: delta_ij + k^2 G~(c_i, c_j) q_j |K_j|.
  const Eigen::MatrixXcd& block() const { return block_; }
  /// q_j |K_j| on the scatterers.
  const Eigen::VectorXcd& contrast_weights() const { return contrast_; }

  /// Solves the scatterer block for one or many right-hand sides.
  Eigen::MatrixXcd solve_block(const Eigen::MatrixXcd& rhs) const;
  Eigen::VectorXcd solve_block(const Eigen::VectorXcd& rhs) const;

  /// Full-system product A u and solve, vectors indexed by tetrahedron.
  std::vector<Complex> apply_full(std::span<const Complex> u) const;
  std::vector<Complex> solve_full(std::span<const Complex> rhs) const;
  double relative_residual(std::span<const Complex> solution,
                           std::span<const Complex> rhs) const;

 private:
  const TetMesh* mesh_;
  double k_;
  double q_sup_ = 0.0;
  std::vector<std::size_t> scatterers_;
  Eigen::VectorXcd contrast_;
  Eigen::MatrixXcd block_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// Linear map from per-tet source amplitudes x_j on a fixed support to
/// Cauchy data on a measurement sphere:
///   u(x) = sum_j G^(x, c_j) s_j x_j,
/// with s_j a fixed real column scale (sqrt(mu) for noise, |K| g for
/// deterministic densities) and G^ the free-space Green's function, or its
/// medium-perturbed counterpart when a nonzero medium is supplied.
class BoundaryOperator {
 public:
  BoundaryOperator(const TetMesh& mesh,
                   std::shared_ptr<const SphereQuadrature> sphere, double k,
                   std::vector<std::size_t> support,
                   std::vector<double> column_scale,
                   const MediumField* medium = nullptr);

  double k() const { return k_; }
  const std::vector<std::size_t>& support() const { return support_; }
  const std::vector<double>& column_scale() const { return scale_; }
  bool has_medium() const { return ls_ != nullptr; }
  const LippmannSchwingerSystem* system() const { return ls_.get(); }
  const std::shared_ptr<const SphereQuadrature>& sphere() const {
    return sphere_;
  }

  /// x has one entry per support tetrahedron.
  CauchyData apply(std::span<const double> x) const;
  /// Convenience: gathers the realization's increments on the support.
  CauchyData apply(const WhiteNoiseRealization& noise) const;

  /// Kernel columns G^(x_i, c_j) s_j and their normal derivatives
  /// (nodes x support); with a medium these solve the Lippmann-Schwinger
  /// system with all support columns as right-hand sides.
  void kernel_columns(Eigen::MatrixXcd& g, Eigen::MatrixXcd& dg) const;

  /// Centroid field u0 on the scatterers and the solved total field there,
  /// for the last apply() diagnostics.
  struct VolumeSolve {
    Eigen::VectorXcd u0;
    Eigen::VectorXcd u;
  };
  VolumeSolve volume_solve(std::span<const double> x) const;

 private:
  const TetMesh* mesh_;
  std::shared_ptr<const SphereQuadrature> sphere_;
  double k_;
  std::vector<std::size_t> support_;
  std::vector<double> scale_;
  // Free-space boundary kernels times column scale, split storage.
  std::vector<double> g_re_, g_im_, dg_re_, dg_im_;
  // Medium correction.
  std::unique_ptr<LippmannSchwingerSystem> ls_;
  std::vector<double> vol_re_, vol_im_;  // G~(c_s, c_j) s_j, scatterers x support
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      corr_g_, corr_dg_;  // -k^2 G(x_i, c_s) q_s |K_s|, nodes x scatterers
};

/// Operator of the white-noise forward map: support of mu, column scale
/// sqrt(mu(c_j)), optionally with a medium.
BoundaryOperator noise_operator(const TetMesh& mesh, const StrengthField& field,
                                std::shared_ptr<const SphereQuadrature> sphere,
                                double k, const MediumField* medium = nullptr);

CauchyData solve_homogeneous(const TetMesh& mesh, const StrengthField& field,
                             const WhiteNoiseRealization& noise,
                             std::shared_ptr<const SphereQuadrature> sphere,
                             double k);

CauchyData solve_inhomogeneous(const TetMesh& mesh, const StrengthField& field,
                               const MediumField& medium,
                               const WhiteNoiseRealization& noise,
                               std::shared_ptr<const SphereQuadrature> sphere,
                               double k);

using Density = std::function<double(const Vec3&)>;

/// Noise-free counterpart: the stochastic sum is replaced by the centroid
/// volume quadrature of G(x, .) g.
CauchyData deterministic_forward(const TetMesh& mesh, const Density& g,
                                 std::shared_ptr<const SphereQuadrature> sphere,
                                 double k, const MediumField* medium = nullptr);

/// Homogeneous deterministic field sum_j |K_j| G(x, c_j) g(c_j) and its
/// gradient at arbitrary points outside the source support.
std::vector<Complex> deterministic_field(const TetMesh& mesh, const Density& g,
                                         double k,
                                         std::span<const Vec3> points);
std::vector<CVec3> deterministic_gradient(const TetMesh& mesh,
                                          const Density& g, double k,
                                          std::span<const Vec3> points);

}  // namespace rsi
