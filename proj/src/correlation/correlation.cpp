#include "rsi/correlation/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "rsi/fields/noise.hpp"
#include "rsi/simd/kernels.hpp"

namespace rsi {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kMonteCarlo: return "monte_carlo";
    case Provenance::kExactHomogeneous: return "exact_homog";
    case Provenance::kExactInhomogeneous: return "exact_inhomog";
    case Provenance::kPerturbed: return "perturbed";
  }
  return "unknown";
}

CorrelationSet CorrelationSet::zeros(
    std::shared_ptr<const SphereQuadrature> sphere, double k) {
  CorrelationSet cs;
  const std::size_t n = sphere->size();
  cs.sphere = std::move(sphere);
  cs.k = k;
  cs.f1.assign(n * n, Complex{});
  cs.f2.assign(n * n, Complex{});
  cs.f3.assign(n * n, Complex{});
  return cs;
}

double kernel_norm(const std::vector<Complex>& f, const SphereQuadrature& sq) {
  const std::size_t n = sq.size();
  if (f.size() != n * n) throw DomainError("kernel_norm: matrix size mismatch");
  return std::sqrt(simd::weighted_abs2(f.data(), n, n, sq.weights.data(),
                                       sq.weights.data()));
}

double compute_M(const CorrelationSet& cs) {
  if (!cs.sphere) throw DomainError("compute_M: missing sphere");
  return std::max({kernel_norm(cs.f1, *cs.sphere), kernel_norm(cs.f2, *cs.sphere),
                   kernel_norm(cs.f3, *cs.sphere)});
}

// ---------------------------------------------------------------------------

CorrelationAccumulator::CorrelationAccumulator(
    std::shared_ptr<const SphereQuadrature> sphere, double k, bool track_moments)
    : sphere_(std::move(sphere)), k_(k), track_(track_moments) {
  if (!sphere_) throw DomainError("CorrelationAccumulator: missing sphere");
  const std::size_t nn = sphere_->size() * sphere_->size();
  for (Sum* s : {&s1_, &s2_, &s3_}) {
    s->value.assign(nn, Complex{});
    s->comp.assign(nn, Complex{});
    if (track_) s->squares.assign(nn, Complex{});
  }
}

void CorrelationAccumulator::add(const CauchyData& data) {
  if (data.sphere.get() != sphere_.get() &&
      (!data.sphere || data.sphere->nodes != sphere_->nodes)) {
    throw DomainError("CorrelationAccumulator: data on a different sphere");
  }
  const int tag = static_cast<int>(data.medium);
  if (medium_ >= 0 && medium_ != tag) {
    throw DomainError("CorrelationAccumulator: mixed medium tags");
  }
  medium_ = tag;
  const std::size_t n = sphere_->size();
  const Complex* u = data.u.data();
  const Complex* d = data.dnu.data();
  simd::rank1_compensated(s1_.value.data(), s1_.comp.data(), n, n, u, u);
  simd::rank1_compensated(s2_.value.data(), s2_.comp.data(), n, n, u, d);
  simd::rank1_compensated(s3_.value.data(), s3_.comp.data(), n, n, d, d);
  if (track_) {
    simd::rank1_squares(s1_.squares.data(), n, n, u, u);
    simd::rank1_squares(s2_.squares.data(), n, n, u, d);
    simd::rank1_squares(s3_.squares.data(), n, n, d, d);
  }
  ++count_;
}

void CorrelationAccumulator::merge_sum(Sum& into, const Sum& from) const {
  auto two_sum = [](double& s, double& c, double x, double cx) {
    const double t = s + x;
    const double z = t - s;
    const double e = (s - (t - z)) + (x - z);
    s = t;
    c = c + (e + cx);
  };
  for (std::size_t i = 0; i < into.value.size(); ++i) {
    double sr = into.value[i].real(), si = into.value[i].imag();
    double cr = into.comp[i].real(), ci = into.comp[i].imag();
    two_sum(sr, cr, from.value[i].real(), from.comp[i].real());
    two_sum(si, ci, from.value[i].imag(), from.comp[i].imag());
    into.value[i] = {sr, si};
    into.comp[i] = {cr, ci};
  }
  if (track_) {
    for (std::size_t i = 0; i < into.squares.size(); ++i)
      into.squares[i] += from.squares[i];
  }
}

void CorrelationAccumulator::merge(const CorrelationAccumulator& other) {
  if (other.sphere_->nodes != sphere_->nodes) {
    throw DomainError("CorrelationAccumulator::merge: different spheres");
  }
  if (other.track_ != track_) {
    throw DomainError("CorrelationAccumulator::merge: moment tracking differs");
  }
  if (other.count_ == 0) return;
  if (medium_ >= 0 && other.medium_ >= 0 && medium_ != other.medium_) {
    throw DomainError("CorrelationAccumulator::merge: mixed medium tags");
  }
  if (medium_ < 0) medium_ = other.medium_;
  merge_sum(s1_, other.s1_);
  merge_sum(s2_, other.s2_);
  merge_sum(s3_, other.s3_);
  count_ += other.count_;
}

CorrelationSet CorrelationAccumulator::finalize() const {
  if (count_ == 0) throw DomainError("accumulate: no realizations");
  CorrelationSet cs;
  cs.sphere = sphere_;
  cs.k = k_;
  cs.n_realizations = count_;
  cs.provenance = Provenance::kMonteCarlo;
  const double inv = 1.0 / static_cast<double>(count_);
  auto mean = [&](const Sum& s, std::vector<Complex>& out) {
    out.resize(s.value.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = (s.value[i] + s.comp[i]) * inv;
  };
  mean(s1_, cs.f1);
  mean(s2_, cs.f2);
  mean(s3_, cs.f3);
  cs.M = compute_M(cs);
  return cs;
}

CorrelationAccumulator::StandardErrors
CorrelationAccumulator::standard_errors() const {
  if (!track_ || count_ < 2) {
    throw DomainError("standard_errors: need second moments and >= 2 samples");
  }
  const double n = static_cast<double>(count_);
  auto se = [&](const Sum& s) {
    std::vector<Complex> out(s.value.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Complex m = (s.value[i] + s.comp[i]) / n;
      const double vr = std::max(0.0, (s.squares[i].real() / n - m.real() * m.real()) * n / (n - 1));
      const double vi = std::max(0.0, (s.squares[i].imag() / n - m.imag() * m.imag()) * n / (n - 1));
      out[i] = {std::sqrt(vr / n), std::sqrt(vi / n)};
    }
    return out;
  };
  return {se(s1_), se(s2_), se(s3_)};
}

CorrelationAccumulator monte_carlo_correlations(const BoundaryOperator& op,
                                                const TetMesh& mesh,
                                                std::uint64_t n_realizations,
                                                std::uint64_t seed, int threads,
                                                bool track_moments,
                                                std::uint64_t first_stream) {
  if (n_realizations == 0) throw DomainError("accumulate: no realizations");
  const auto workers = static_cast<std::uint64_t>(
      std::clamp<std::uint64_t>(threads < 1 ? 1 : threads, 1, n_realizations));
  std::vector<CorrelationAccumulator> parts;
  parts.reserve(workers);
  for (std::uint64_t w = 0; w < workers; ++w)
    parts.emplace_back(op.sphere(), op.k(), track_moments);

  auto run = [&](std::uint64_t w) {
    const std::uint64_t lo = n_realizations * w / workers;
    const std::uint64_t hi = n_realizations * (w + 1) / workers;
    for (std::uint64_t r = lo; r < hi; ++r) {
      const auto noise = sample_white_noise(mesh, seed, first_stream + r);
      parts[w].add(op.apply(noise));
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (std::uint64_t w = 1; w < workers; ++w) parts[0].merge(parts[w]);
  return std::move(parts[0]);
}

// ---------------------------------------------------------------------------

namespace {

using RowMat =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<Complex> to_row_major(const Eigen::MatrixXcd& m, bool symmetrize) {
  std::vector<Complex> out(static_cast<std::size_t>(m.size()));
  Eigen::Map<RowMat> dst(out.data(), m.rows(), m.cols());
  if (symmetrize) {
    dst = 0.5 * (m + m.transpose());
  } else {
    dst = m;
  }
  return out;
}

}  // namespace

CorrelationSet exact_correlations(const BoundaryOperator& op,
                                  const TetMesh& mesh) {
  CorrelationSet cs = CorrelationSet::zeros(op.sphere(), 0.0);
  cs.k = op.k();
  cs.provenance = op.has_medium() ? Provenance::kExactInhomogeneous
                                  : Provenance::kExactHomogeneous;
  if (op.support().empty()) return cs;
  Eigen::MatrixXcd g, dg;
  op.kernel_columns(g, dg);
  Eigen::VectorXd vol(static_cast<Eigen::Index>(op.support().size()));
  for (std::size_t j = 0; j < op.support().size(); ++j)
    vol(static_cast<Eigen::Index>(j)) = mesh.volumes[op.support()[j]];
  const Eigen::MatrixXcd gd = g * vol.asDiagonal();
  const Eigen::MatrixXcd dgd = dg * vol.asDiagonal();
  cs.f1 = to_row_major(gd * g.transpose(), true);
  cs.f2 = to_row_major(gd * dg.transpose(), false);
  cs.f3 = to_row_major(dgd * dg.transpose(), true);
  cs.M = compute_M(cs);
  return cs;
}

CorrelationSet exact_correlations_homogeneous(
    const TetMesh& mesh, const StrengthField& field,
    std::shared_ptr<const SphereQuadrature> sphere, double k) {
  return exact_correlations(noise_operator(mesh, field, std::move(sphere), k),
                            mesh);
}

CorrelationSet exact_correlations_inhomogeneous(
    const TetMesh& mesh, const StrengthField& field, const MediumField& medium,
    std::shared_ptr<const SphereQuadrature> sphere, double k) {
  CorrelationSet cs = exact_correlations(
      noise_operator(mesh, field, std::move(sphere), k, &medium), mesh);
  cs.provenance = Provenance::kExactInhomogeneous;
  return cs;
}

CorrelationSet perturb(const CorrelationSet& cs, double eps,
                       std::uint64_t seed) {
  if (!(eps >= 0.0)) throw DomainError("perturb: eps must be >= 0");
  CorrelationSet out = cs;
  out.provenance = Provenance::kPerturbed;
  if (eps == 0.0) return out;
  const std::size_t n = cs.n();
  std::vector<double> z(2 * n * n);
  std::vector<Complex>* targets[3] = {&out.f1, &out.f2, &out.f3};
  for (std::uint32_t which = 0; which < 3; ++which) {
    NoiseStream{seed, which, 0x20000u}.normals(z.data(), z.size());
    std::vector<Complex> e(n * n);
    for (std::size_t i = 0; i < n * n; ++i) e[i] = {z[2 * i], z[2 * i + 1]};
    if (which != 1) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const Complex s = 0.5 * (e[i * n + j] + e[j * n + i]);
          e[i * n + j] = s;
          e[j * n + i] = s;
        }
      }
    }
    const double scale = eps / kernel_norm(e, *cs.sphere);
    auto& f = *targets[which];
    for (std::size_t i = 0; i < n * n; ++i) f[i] += scale * e[i];
  }
  out.M = compute_M(out);
  return out;
}

CorrelationSet axpy(const CorrelationSet& cs1, Complex alpha,
                    const CorrelationSet& cs2) {
  if (cs1.n() != cs2.n()) throw DomainError("axpy: sphere mismatch");
  CorrelationSet out = cs1;
  for (std::size_t i = 0; i < out.f1.size(); ++i) {
    out.f1[i] += alpha * cs2.f1[i];
    out.f2[i] += alpha * cs2.f2[i];
    out.f3[i] += alpha * cs2.f3[i];
  }
  out.M = compute_M(out);
  return out;
}

}  // namespace rsi
