#include "rsi/inversion/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "rsi/simd/kernels.hpp"

namespace rsi {

const char* probe_kind_name(ProbeKind kind) {
  return kind == ProbeKind::kReal ? "real" : "complex";
}

Vec3 probe_direction(const Vec3& gamma) {
  if (gamma.isZero(0.0)) return Vec3::UnitX();
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(gamma(a)) < std::abs(gamma(axis))) axis = a;
  // Canonical sign so that gamma and -gamma share the direction.
  Vec3 g = gamma;
  for (int a = 0; a < 3; ++a) {
    if (g(a) != 0.0) {
      if (g(a) < 0.0) g = -g;
      break;
    }
  }
  Vec3 d = Vec3::Unit(axis).cross(g).normalized();
  // One Gram-Schmidt pass removes the rounding left by the cross product.
  const Vec3 gh = g.normalized();
  d = (d - d.dot(gh) * gh).normalized();
  return d;
}

ProbePair make_real_probe(const Vec3& gamma, double k) {
  const double g2 = gamma.squaredNorm();
  if (!(std::sqrt(g2) < 2.0 * k)) {
    throw OutOfBandError("real probe requires |gamma| < 2k (|gamma| = " +
                         std::to_string(std::sqrt(g2)) +
                         ", 2k = " + std::to_string(2.0 * k) + ")");
  }
  ProbePair p;
  p.gamma = gamma;
  p.k = k;
  p.kind = ProbeKind::kReal;
  p.d2 = probe_direction(gamma);
  const double s = std::sqrt(std::max(0.0, k * k - 0.25 * g2));
  const Vec3 half = -0.5 * gamma;
  p.xi1 = (half + s * p.d2).cast<Complex>();
  p.xi2 = (half - s * p.d2).cast<Complex>();
  return p;
}

ProbePair make_complex_probe(const Vec3& gamma, double k, double t) {
  if (!(t >= 0.0)) throw DomainError("complex probe requires t >= 0");
  ProbePair p;
  p.gamma = gamma;
  p.k = k;
  p.kind = ProbeKind::kComplex;
  p.t = t;
  p.d2 = probe_direction(gamma);
  p.d1 = gamma.isZero(0.0) ? Vec3::UnitY()
                           : Vec3(gamma.normalized().cross(p.d2).normalized());
  // Beyond the real band with small t the radicand is negative; the principal
  // complex root keeps xi . xi = k^2.
  const Complex s = std::sqrt(Complex(t * t + k * k - 0.25 * gamma.squaredNorm()));
  const CVec3 half = (-0.5 * gamma).cast<Complex>();
  const CVec3 tail = Complex(0.0, t) * p.d1.cast<Complex>() + s * p.d2.cast<Complex>();
  p.xi1 = half + tail;
  p.xi2 = half - tail;
  return p;
}

ProbeTrace probe_trace(const ProbePair& pair, const SphereQuadrature& sq) {
  ProbeTrace tr;
  const std::size_t n = sq.size();
  tr.u1.resize(n);
  tr.u2.resize(n);
  tr.dnu1.resize(n);
  tr.dnu2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CVec3 x = sq.nodes[i].cast<Complex>();
    const CVec3 nu = sq.normals[i].cast<Complex>();
    tr.u1[i] = std::exp(kI * dotu(pair.xi1, x));
    tr.u2[i] = std::exp(kI * dotu(pair.xi2, x));
    tr.dnu1[i] = kI * dotu(pair.xi1, nu) * tr.u1[i];
    tr.dnu2[i] = kI * dotu(pair.xi2, nu) * tr.u2[i];
  }
  return tr;
}

namespace {

constexpr double kInvTwoPiCubed = 1.0 / (8.0 * kPi * kPi * kPi);

Complex quadratic_form(const CorrelationSet& cs, const ProbeTrace& tr) {
  const std::size_t n = cs.n();
  const auto& w = cs.sphere->weights;
  std::vector<Complex> a(n), b(n), c(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = w[i] * tr.u1[i];
    b[i] = w[i] * tr.u2[i];
    c[i] = w[i] * tr.dnu2[i];
    d[i] = w[i] * tr.dnu1[i];
  }
  // sum_ij F2(j,i) a_i c_j = c^T F2 a.
  return simd::cbilinear(cs.f3.data(), n, n, a.data(), b.data()) -
         simd::cbilinear(cs.f2.data(), n, n, c.data(), a.data()) -
         simd::cbilinear(cs.f2.data(), n, n, d.data(), b.data()) +
         simd::cbilinear(cs.f1.data(), n, n, d.data(), c.data());
}

}  // namespace

Complex spectral_estimate(const CorrelationSet& cs, const ProbePair& pair) {
  if (!cs.sphere) throw DomainError("spectral_estimate: missing sphere");
  if (std::abs(cs.k - pair.k) > 1e-12 * std::max(1.0, cs.k)) {
    throw DomainError("spectral_estimate: probe k " + std::to_string(pair.k) +
                      " differs from data k " + std::to_string(cs.k));
  }
  return kInvTwoPiCubed * quadratic_form(cs, probe_trace(pair, *cs.sphere));
}

Complex boundary_functional(const CauchyData& data,
                            const std::vector<Complex>& U,
                            const std::vector<Complex>& dnuU) {
  const auto& w = data.sphere->weights;
  Complex acc{};
  for (std::size_t i = 0; i < w.size(); ++i)
    acc += w[i] * (data.dnu[i] * U[i] - dnuU[i] * data.u[i]);
  return acc;
}

SpectralEstimate estimate_spectrum(const CorrelationSet& cs,
                                   std::shared_ptr<const FrequencyGrid> grid,
                                   ProbeKind kind, double t, int threads) {
  SpectralEstimate se;
  se.kind = kind;
  se.k = cs.k;
  se.t = t;
  se.provenance = cs.provenance;
  se.values.resize(grid->size());
  if (kind == ProbeKind::kReal && !(grid->rho < 2.0 * cs.k)) {
    throw OutOfBandError("real probes need rho < 2k (rho = " +
                         std::to_string(grid->rho) + ", k = " +
                         std::to_string(cs.k) + ")");
  }
  const std::size_t n = grid->size();
  const std::size_t workers =
      std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(n, 1));
  auto run = [&](std::size_t w) {
    for (std::size_t i = n * w / workers; i < n * (w + 1) / workers; ++i) {
      const ProbePair p = kind == ProbeKind::kReal
                              ? make_real_probe(grid->nodes[i], cs.k)
                              : make_complex_probe(grid->nodes[i], cs.k, t);
      se.values[i] = spectral_estimate(cs, p);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  se.grid = std::move(grid);
  return se;
}

SpectralEstimate oracle_spectrum(const StrengthField& field,
                                 std::shared_ptr<const FrequencyGrid> grid) {
  SpectralEstimate se;
  se.values.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i)
    se.values[i] = fourier_oracle(field, grid->nodes[i]);
  se.grid = std::move(grid);
  se.provenance = Provenance::kExactHomogeneous;
  return se;
}

double select_rho_holder(double M, double s, double k, double cal) {
  if (!(M > 0.0) || !(s > 3.0) || !(cal > 0.0)) {
    throw DomainError("select_rho_holder: need M > 0, s > 3, cal > 0");
  }
  return std::min(cal * std::pow(M, -1.0 / s), 0.95 * 2.0 * k);
}

LogSelection select_t_rho_log(double M, double R, double tau, double cal7) {
  if (!(M > 0.0) || !(tau > 0.0 && tau <= 1.0) || !(cal7 > 0.0) || !(R > 0.0)) {
    throw DomainError("select_t_rho_log: need M > 0, tau in (0, 1], cal7 > 0");
  }
  LogSelection sel;
  sel.t = (1.0 - tau) * std::log(3.0 + 1.0 / M) / (4.0 * R);
  sel.rho = std::cbrt(sel.t / (2.0 * cal7));
  if (tau == 1.0) sel.warning = "tau = 1 gives t = 0 (degenerate selection)";
  return sel;
}

EvaluationGrid make_evaluation_grid(double spacing) {
  if (!(spacing > 0.0) || spacing > 0.5) {
    throw ConfigError("evaluation grid spacing must lie in (0, 0.5]");
  }
  EvaluationGrid g;
  const int n = static_cast<int>(std::floor(1.0 / spacing));
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j)
      for (int l = -n; l <= n; ++l) {
        const Vec3 x(i * spacing, j * spacing, l * spacing);
        if (x.norm() < 1.0) {
          g.points.push_back(x);
          g.weights.push_back(spacing * spacing * spacing);
        }
      }
  return g;
}

Reconstruction invert_truncated(const SpectralEstimate& se,
                                const EvaluationGrid& eval,
                                const StrengthField* truth) {
  const FrequencyGrid& grid = *se.grid;
  Reconstruction rec;
  rec.points = eval.points;
  rec.rho = grid.rho;
  rec.values.assign(eval.points.size(), Complex{});

  int lmax = 0;
  for (const auto& l : grid.lattice)
    for (int a = 0; a < 3; ++a) lmax = std::max(lmax, std::abs(l[a]));
  const int width = 2 * lmax + 1;

  std::vector<Complex> wmu(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    wmu[i] = grid.weights[i] * se.values[i];

  // exp(i gamma . x) = prod_a exp(i h l_a x_a) from per-axis phasor tables.
  std::vector<Complex> tab(3 * static_cast<std::size_t>(width));
  for (std::size_t p = 0; p < eval.points.size(); ++p) {
    const Vec3& x = eval.points[p];
    for (int a = 0; a < 3; ++a)
      for (int l = -lmax; l <= lmax; ++l)
        tab[a * width + l + lmax] = std::polar(1.0, grid.spacing * l * x(a));
    Complex acc{};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& l = grid.lattice[i];
      acc += wmu[i] * (tab[l[0] + lmax] * tab[width + l[1] + lmax] *
                       tab[2 * width + l[2] + lmax]);
    }
    rec.values[p] = acc;
    rec.max_imag = std::max(rec.max_imag, std::abs(acc.imag()));
  }

  if (truth != nullptr) {
    rec.truth.resize(eval.points.size());
    double l2 = 0.0, l2c = 0.0;
    for (std::size_t p = 0; p < eval.points.size(); ++p) {
      const double mu = eval_strength(*truth, eval.points[p]);
      rec.truth[p] = mu;
      rec.truth_sup = std::max(rec.truth_sup, mu);
      const double e = std::abs(rec.values[p].real() - mu);
      const double ec = std::abs(std::max(0.0, rec.values[p].real()) - mu);
      rec.sup_error = std::max(rec.sup_error, e);
      rec.sup_error_clamped = std::max(rec.sup_error_clamped, ec);
      l2 += eval.weights[p] * e * e;
      l2c += eval.weights[p] * ec * ec;
    }
    rec.l2_error = std::sqrt(l2);
    rec.l2_error_clamped = std::sqrt(l2c);
  }
  return rec;
}

}  // namespace rsi
