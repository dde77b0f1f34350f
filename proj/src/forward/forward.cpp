#include "rsi/forward/forward.hpp"

#include <cmath>
#include <string>

#include "rsi/forward/green.hpp"
#include "rsi/simd/kernels.hpp"

namespace rsi {

void CauchyData::validate() const {
  if (!sphere) throw DomainError("CauchyData: missing sphere");
  if (u.size() != sphere->size() || dnu.size() != sphere->size()) {
    throw DomainError("CauchyData: length does not match node count");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i].real()) || !std::isfinite(u[i].imag()) ||
        !std::isfinite(dnu[i].real()) || !std::isfinite(dnu[i].imag())) {
      throw DomainError("CauchyData: non-finite entry at node " +
                        std::to_string(i));
    }
  }
}

std::vector<std::size_t> strength_support(const TetMesh& mesh,
                                          const StrengthField& field) {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < mesh.size(); ++j)
    if (eval_strength(field, mesh.centroids[j]) > 0.0) s.push_back(j);
  return s;
}

std::vector<std::size_t> medium_support(const TetMesh& mesh,
                                        const MediumField& medium) {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < mesh.size(); ++j)
    if (eval_medium(medium, mesh.centroids[j]) != Complex{}) s.push_back(j);
  return s;
}

Complex centroid_green(const TetMesh& mesh, double k, std::size_t i,
                       std::size_t j) {
  if (i == j) return self_cell_integral(k, mesh.volumes[i]) / mesh.volumes[i];
  return green(k, mesh.centroids[i], mesh.centroids[j]);
}

// ---------------------------------------------------------------------------

LippmannSchwingerSystem::LippmannSchwingerSystem(const TetMesh& mesh,
                                                 const MediumField& medium,
                                                 double k)
    : mesh_(&mesh), k_(k) {
  medium.validate();
  scatterers_ = medium_support(mesh, medium);
  const auto n = static_cast<Eigen::Index>(scatterers_.size());
  contrast_.resize(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const Complex q = eval_medium(medium, mesh.centroids[scatterers_[s]]);
    q_sup_ = std::max(q_sup_, std::abs(q));
    contrast_(s) = q * mesh.volumes[scatterers_[s]];
  }
  block_.resize(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      block_(a, b) = k * k *
                     centroid_green(mesh, k, scatterers_[a], scatterers_[b]) *
                     contrast_(b);
    }
    block_(b, b) += 1.0;
  }
  if (n > 0) {
    lu_.compute(block_);
    const double rc = lu_.rcond();
    if (!(rc > 1e-13) || !std::isfinite(rc)) {
      throw SingularSystemError(
          "Lippmann-Schwinger factorization is singular (rcond " +
              std::to_string(rc) + ", k " + std::to_string(k) + ", |q|inf " +
              std::to_string(q_sup_) + ")",
          k, q_sup_);
    }
  }
}

Eigen::MatrixXcd LippmannSchwingerSystem::solve_block(
    const Eigen::MatrixXcd& rhs) const {
  if (scatterers_.empty()) return rhs;
  return lu_.solve(rhs);
}

Eigen::VectorXcd LippmannSchwingerSystem::solve_block(
    const Eigen::VectorXcd& rhs) const {
  if (scatterers_.empty()) return rhs;
  return lu_.solve(rhs);
}

std::vector<Complex> LippmannSchwingerSystem::apply_full(
    std::span<const Complex> u) const {
  if (u.size() != mesh_->size()) {
    throw DomainError("apply_full: vector length must equal tet count");
  }
  std::vector<Complex> out(u.begin(), u.end());
  for (std::size_t i = 0; i < mesh_->size(); ++i) {
    Complex acc{};
    for (std::size_t s = 0; s < scatterers_.size(); ++s) {
      acc += centroid_green(*mesh_, k_, i, scatterers_[s]) * contrast_(s) *
             u[scatterers_[s]];
    }
    out[i] += k_ * k_ * acc;
  }
  return out;
}

std::vector<Complex> LippmannSchwingerSystem::solve_full(
    std::span<const Complex> rhs) const {
  if (rhs.size() != mesh_->size()) {
    throw DomainError("solve_full: vector length must equal tet count");
  }
  const auto n = static_cast<Eigen::Index>(scatterers_.size());
  Eigen::VectorXcd r(n);
  for (Eigen::Index s = 0; s < n; ++s) r(s) = rhs[scatterers_[s]];
  const Eigen::VectorXcd us = solve_block(r);
  std::vector<Complex> out(rhs.begin(), rhs.end());
  std::vector<char> is_scatterer(mesh_->size(), 0);
  for (Eigen::Index s = 0; s < n; ++s) {
    is_scatterer[scatterers_[s]] = 1;
    out[scatterers_[s]] = us(s);
  }
  for (std::size_t i = 0; i < mesh_->size(); ++i) {
    if (is_scatterer[i]) continue;
    Complex acc{};
    for (Eigen::Index s = 0; s < n; ++s)
      acc += centroid_green(*mesh_, k_, i, scatterers_[s]) * contrast_(s) * us(s);
    out[i] = rhs[i] - k_ * k_ * acc;
  }
  return out;
}

double LippmannSchwingerSystem::relative_residual(
    std::span<const Complex> solution, std::span<const Complex> rhs) const {
  const auto a = apply_full(solution);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - rhs[i]);
    den += std::norm(rhs[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// ---------------------------------------------------------------------------

BoundaryOperator::BoundaryOperator(
    const TetMesh& mesh, std::shared_ptr<const SphereQuadrature> sphere,
    double k, std::vector<std::size_t> support, std::vector<double> column_scale,
    const MediumField* medium)
    : mesh_(&mesh),
      sphere_(std::move(sphere)),
      k_(k),
      support_(std::move(support)),
      scale_(std::move(column_scale)) {
  if (!sphere_) throw DomainError("BoundaryOperator: missing sphere");
  if (scale_.size() != support_.size()) {
    throw DomainError("BoundaryOperator: one column scale per support tet");
  }
  const std::size_t nodes = sphere_->size();
  const std::size_t cols = support_.size();
  g_re_.resize(nodes * cols);
  g_im_.resize(nodes * cols);
  dg_re_.resize(nodes * cols);
  dg_im_.resize(nodes * cols);
  for (std::size_t i = 0; i < nodes; ++i) {
    const Vec3& x = sphere_->nodes[i];
    const Vec3& nu = sphere_->normals[i];
    for (std::size_t j = 0; j < cols; ++j) {
      const Vec3& c = mesh.centroids[support_[j]];
      const Complex g = green(k, x, c) * scale_[j];
      const Complex dg = green_normal_derivative(k, x, c, nu) * scale_[j];
      g_re_[i * cols + j] = g.real();
      g_im_[i * cols + j] = g.imag();
      dg_re_[i * cols + j] = dg.real();
      dg_im_[i * cols + j] = dg.imag();
    }
  }

  if (medium == nullptr || medium->is_zero()) return;
  ls_ = std::make_unique<LippmannSchwingerSystem>(mesh, *medium, k);
  const auto& scat = ls_->scatterers();
  if (scat.empty()) {
    ls_.reset();
    return;
  }
  const std::size_t ns = scat.size();
  vol_re_.resize(ns * cols);
  vol_im_.resize(ns * cols);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t j = 0; j < cols; ++j) {
      const Complex v = centroid_green(mesh, k, scat[s], support_[j]) * scale_[j];
      vol_re_[s * cols + j] = v.real();
      vol_im_[s * cols + j] = v.imag();
    }
  }
  corr_g_.resize(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(ns));
  corr_dg_.resize(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(ns));
  for (std::size_t i = 0; i < nodes; ++i) {
    const Vec3& x = sphere_->nodes[i];
    const Vec3& nu = sphere_->normals[i];
    for (std::size_t s = 0; s < ns; ++s) {
      const Vec3& c = mesh.centroids[scat[s]];
      const Complex w = -k * k * ls_->contrast_weights()(static_cast<Eigen::Index>(s));
      corr_g_(i, s) = green(k, x, c) * w;
      corr_dg_(i, s) = green_normal_derivative(k, x, c, nu) * w;
    }
  }
}

BoundaryOperator::VolumeSolve BoundaryOperator::volume_solve(
    std::span<const double> x) const {
  VolumeSolve out;
  if (!ls_) return out;
  const std::size_t ns = ls_->scatterers().size();
  std::vector<Complex> u0(ns);
  simd::planar_gemv_real(vol_re_.data(), vol_im_.data(), ns, support_.size(),
                         x.data(), u0.data());
  out.u0 = Eigen::Map<const Eigen::VectorXcd>(u0.data(),
                                              static_cast<Eigen::Index>(ns));
  out.u = ls_->solve_block(out.u0);
  return out;
}

CauchyData BoundaryOperator::apply(std::span<const double> x) const {
  if (x.size() != support_.size()) {
    throw DomainError("BoundaryOperator::apply: one amplitude per support tet");
  }
  const std::size_t nodes = sphere_->size();
  const std::size_t cols = support_.size();
  CauchyData out;
  out.sphere = sphere_;
  out.u.resize(nodes);
  out.dnu.resize(nodes);
  simd::planar_gemv_real(g_re_.data(), g_im_.data(), nodes, cols, x.data(),
                         out.u.data());
  simd::planar_gemv_real(dg_re_.data(), dg_im_.data(), nodes, cols, x.data(),
                         out.dnu.data());
  out.medium = MediumTag::kHomogeneous;
  if (!ls_) return out;

  out.medium = MediumTag::kInhomogeneous;
  const VolumeSolve vs = volume_solve(x);
  const std::size_t ns = ls_->scatterers().size();
  std::vector<Complex> corr(nodes);
  simd::cgemv(corr_g_.data(), nodes, ns, vs.u.data(), corr.data());
  for (std::size_t i = 0; i < nodes; ++i) out.u[i] += corr[i];
  simd::cgemv(corr_dg_.data(), nodes, ns, vs.u.data(), corr.data());
  for (std::size_t i = 0; i < nodes; ++i) out.dnu[i] += corr[i];
  return out;
}

CauchyData BoundaryOperator::apply(const WhiteNoiseRealization& noise) const {
  if (noise.increments.size() != mesh_->size() ||
      noise.mesh_id != mesh_->mesh_id()) {
    throw DomainError("noise realization does not match the mesh");
  }
  std::vector<double> x(support_.size());
  for (std::size_t j = 0; j < support_.size(); ++j)
    x[j] = noise.increments[support_[j]];
  CauchyData out = apply(x);
  out.seed = noise.seed;
  out.stream = noise.stream;
  return out;
}

void BoundaryOperator::kernel_columns(Eigen::MatrixXcd& g,
                                      Eigen::MatrixXcd& dg) const {
  const auto nodes = static_cast<Eigen::Index>(sphere_->size());
  const auto cols = static_cast<Eigen::Index>(support_.size());
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>;
  Eigen::Map<const RowMat> gr(g_re_.data(), nodes, cols);
  Eigen::Map<const RowMat> gi(g_im_.data(), nodes, cols);
  Eigen::Map<const RowMat> dgr(dg_re_.data(), nodes, cols);
  Eigen::Map<const RowMat> dgi(dg_im_.data(), nodes, cols);
  g.resize(nodes, cols);
  dg.resize(nodes, cols);
  g.real() = gr;
  g.imag() = gi;
  dg.real() = dgr;
  dg.imag() = dgi;
  if (!ls_) return;
  const auto ns = static_cast<Eigen::Index>(ls_->scatterers().size());
  Eigen::MatrixXcd vol(ns, cols);
  vol.real() = Eigen::Map<const RowMat>(vol_re_.data(), ns, cols);
  vol.imag() = Eigen::Map<const RowMat>(vol_im_.data(), ns, cols);
  const Eigen::MatrixXcd u = ls_->solve_block(vol);
  g.noalias() += corr_g_ * u;
  dg.noalias() += corr_dg_ * u;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> sqrt_strength(const TetMesh& mesh, const StrengthField& f,
                                  const std::vector<std::size_t>& support) {
  std::vector<double> s(support.size());
  for (std::size_t j = 0; j < support.size(); ++j)
    s[j] = std::sqrt(eval_strength(f, mesh.centroids[support[j]]));
  return s;
}

}  // namespace

BoundaryOperator noise_operator(const TetMesh& mesh, const StrengthField& field,
                                std::shared_ptr<const SphereQuadrature> sphere,
                                double k, const MediumField* medium) {
  auto support = strength_support(mesh, field);
  auto scale = sqrt_strength(mesh, field, support);
  return BoundaryOperator(mesh, std::move(sphere), k, std::move(support),
                          std::move(scale), medium);
}

CauchyData solve_homogeneous(const TetMesh& mesh, const StrengthField& field,
                             const WhiteNoiseRealization& noise,
                             std::shared_ptr<const SphereQuadrature> sphere,
                             double k) {
  auto support = strength_support(mesh, field);
  auto scale = sqrt_strength(mesh, field, support);
  BoundaryOperator op(mesh, std::move(sphere), k, std::move(support),
                      std::move(scale));
  return op.apply(noise);
}

CauchyData solve_inhomogeneous(const TetMesh& mesh, const StrengthField& field,
                               const MediumField& medium,
                               const WhiteNoiseRealization& noise,
                               std::shared_ptr<const SphereQuadrature> sphere,
                               double k) {
  auto support = strength_support(mesh, field);
  auto scale = sqrt_strength(mesh, field, support);
  BoundaryOperator op(mesh, std::move(sphere), k, std::move(support),
                      std::move(scale), &medium);
  CauchyData out = op.apply(noise);
  out.medium = MediumTag::kInhomogeneous;
  return out;
}

CauchyData deterministic_forward(const TetMesh& mesh, const Density& g,
                                 std::shared_ptr<const SphereQuadrature> sphere,
                                 double k, const MediumField* medium) {
  std::vector<std::size_t> support;
  std::vector<double> scale;
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const double v = g(mesh.centroids[j]);
    if (v != 0.0) {
      support.push_back(j);
      scale.push_back(mesh.volumes[j] * v);
    }
  }
  const std::vector<double> ones(support.size(), 1.0);
  BoundaryOperator op(mesh, std::move(sphere), k, std::move(support),
                      std::move(scale), medium);
  return op.apply(ones);
}

std::vector<Complex> deterministic_field(const TetMesh& mesh, const Density& g,
                                         double k,
                                         std::span<const Vec3> points) {
  std::vector<Complex> out(points.size());
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const double v = g(mesh.centroids[j]);
    if (v == 0.0) continue;
    const double w = mesh.volumes[j] * v;
    for (std::size_t p = 0; p < points.size(); ++p)
      out[p] += green(k, points[p], mesh.centroids[j]) * w;
  }
  return out;
}

std::vector<CVec3> deterministic_gradient(const TetMesh& mesh,
                                          const Density& g, double k,
                                          std::span<const Vec3> points) {
  std::vector<CVec3> out(points.size(), CVec3::Zero());
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const double v = g(mesh.centroids[j]);
    if (v == 0.0) continue;
    const double w = mesh.volumes[j] * v;
    for (std::size_t p = 0; p < points.size(); ++p)
      out[p] += green_gradient(k, points[p], mesh.centroids[j]) * w;
  }
  return out;
}

}  // namespace rsi
