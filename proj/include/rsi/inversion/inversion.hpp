#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rsi/correlation/correlation.hpp"
#include "rsi/fields/fields.hpp"
#include "rsi/geometry/quadrature.hpp"

namespace rsi {

enum class ProbeKind : std::uint8_t { kReal = 0, kComplex = 1 };

const char* probe_kind_name(ProbeKind kind);

/// Two exponential solutions U_l = exp(i xi_l . x) of the background equation
/// with xi_1 + xi_2 = -gamma and xi_l . xi_l = k^2 (unconjugated).
struct ProbePair {
  Vec3 gamma = Vec3::Zero();
  double k = 0.0;
  ProbeKind kind = ProbeKind::kReal;
  double t = 0.0;
  Vec3 d1 = Vec3::Zero();  // imaginary direction (complex kind)
  Vec3 d2 = Vec3::Zero();  // real direction
  CVec3 xi1 = CVec3::Zero();
  CVec3 xi2 = CVec3::Zero();
};

/// Unit vector orthogonal to gamma, identical for gamma and -gamma. The cross
/// product is taken with the basis vector along gamma's smallest component
/// (lowest index on ties); gamma = 0 gives e1.
Vec3 probe_direction(const Vec3& gamma);

/// xi^(1,2) = -gamma/2 +- sqrt(k^2 - |gamma|^2/4) d. Throws OutOfBandError for
/// |gamma| >= 2k.
ProbePair make_real_probe(const Vec3& gamma, double k);

/// xi^(1,2) = -gamma/2 +- (i t d1 + sqrt(t^2 + k^2 - |gamma|^2/4) d2), with d2
/// the real-probe direction and d1 = gamma_hat x d2 (e2 at gamma = 0). Throws
/// DomainError for t < 0 or t = 0 beyond the real band.
ProbePair make_complex_probe(const Vec3& gamma, double k, double t);

struct ProbeTrace {
  std::vector<Complex> u1, u2, dnu1, dnu2;
};

/// U_l(x_i) and dnu U_l(x_i) = i (xi_l . nu_i) U_l(x_i) at the sphere nodes.
ProbeTrace probe_trace(const ProbePair& pair, const SphereQuadrature& sq);

/// (2 pi)^{-3} Q with
///   Q = sum_ij w_i w_j [F3(i,j) U1_i U2_j - F2(j,i) U1_i dU2_j
///                       - F2(i,j) dU1_i U2_j + F1(i,j) dU1_i dU2_j].
/// Throws DomainError when cs and pair disagree on k.
Complex spectral_estimate(const CorrelationSet& cs, const ProbePair& pair);

/// Boundary functional <f, U> = sum_i w_i (dnu u_i U_i - dnu U_i u_i) of one
/// set of Cauchy data (deterministic mode).
Complex boundary_functional(const CauchyData& data, const std::vector<Complex>& U,
                            const std::vector<Complex>& dnuU);

struct SpectralEstimate {
  std::shared_ptr<const FrequencyGrid> grid;
  std::vector<Complex> values;
  ProbeKind kind = ProbeKind::kReal;
  double k = 0.0;
  double t = 0.0;
  Provenance provenance = Provenance::kMonteCarlo;
};

/// Probe at every grid node; nodes are split into contiguous per-thread ranges
/// and each value is an independent reduction, so the result does not depend
/// on the thread count.
SpectralEstimate estimate_spectrum(const CorrelationSet& cs,
                                   std::shared_ptr<const FrequencyGrid> grid,
                                   ProbeKind kind, double t = 0.0,
                                   int threads = 1);

/// Spectral values taken directly from the Fourier oracle (no data).
SpectralEstimate oracle_spectrum(const StrengthField& field,
                                 std::shared_ptr<const FrequencyGrid> grid);

/// rho = min(cal * M^{-1/s}, 0.95 * 2k).
double select_rho_holder(double M, double s, double k, double cal);

struct LogSelection {
  double t = 0.0;
  double rho = 0.0;
  std::string warning;
};

/// t = (1 - tau) ln(3 + 1/M) / (4R), rho = (t / (2 cal7))^{1/3}.
LogSelection select_t_rho_log(double M, double R, double tau, double cal7);

/// Points of spacing * Z^3 inside the unit ball with cell-volume weights.
struct EvaluationGrid {
  std::vector<Vec3> points;
  std::vector<double> weights;
};
EvaluationGrid make_evaluation_grid(double spacing);

struct Reconstruction {
  std::vector<Vec3> points;
  std::vector<Complex> values;
  std::vector<double> truth;  // empty without ground truth
  double rho = 0.0;
  double max_imag = 0.0;
  double sup_error = 0.0;
  double l2_error = 0.0;
  double sup_error_clamped = 0.0;
  double l2_error_clamped = 0.0;
  double truth_sup = 0.0;
};

/// mu_rec(x) = sum_i w_i exp(i gamma_i . x) mu_est(gamma_i). Error metrics are
/// filled when a truth is given (L2 uses the evaluation-grid weights).
Reconstruction invert_truncated(const SpectralEstimate& se,
                                const EvaluationGrid& eval,
                                const StrengthField* truth = nullptr);

}  // namespace rsi
