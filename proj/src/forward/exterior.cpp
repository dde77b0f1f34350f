#include "rsi/forward/exterior.hpp"

#include <algorithm>
#include <cmath>

namespace rsi {

std::vector<Complex> spherical_hankel1(int L, double z) {
  if (!(z > 0.0)) throw DomainError("spherical_hankel1: argument must be > 0");
  std::vector<Complex> h(static_cast<std::size_t>(std::max(L, 1)) + 1);
  const Complex e = std::polar(1.0, z);
  h[0] = Complex(0.0, -1.0) * e / z;
  h[1] = -e * Complex(z, 1.0) / (z * z);
  for (int n = 1; n + 1 <= L; ++n)
    h[n + 1] = double(2 * n + 1) / z * h[n] - h[n - 1];
  h.resize(static_cast<std::size_t>(L) + 1);
  return h;
}

std::vector<Complex> spherical_harmonics(int L, const Vec3& dir) {
  const double r = dir.norm();
  const double x = std::clamp(dir.z() / r, -1.0, 1.0);
  const double st = std::sqrt(std::max(0.0, 1.0 - x * x));
  const double phi = std::atan2(dir.y(), dir.x());

  // Normalized associated Legendre functions, column by column in m.
  std::vector<double> p((L + 1) * (L + 1), 0.0);
  auto P = [&](int n, int m) -> double& { return p[n * (L + 1) + m]; };
  P(0, 0) = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 1; m <= L; ++m)
    P(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * P(m - 1, m - 1);
  for (int m = 0; m < L; ++m) {
    P(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * P(m, m);
    for (int n = m + 2; n <= L; ++n) {
      const double a = std::sqrt((4.0 * n * n - 1.0) / double(n * n - m * m));
      const double b = std::sqrt(double((n - 1) * (n - 1) - m * m) /
                                 (4.0 * (n - 1) * (n - 1) - 1.0));
      P(n, m) = a * (x * P(n - 1, m) - b * P(n - 2, m));
    }
  }

  std::vector<Complex> y((L + 1) * (L + 1));
  for (int n = 0; n <= L; ++n) {
    y[n * n + n] = P(n, 0);
    for (int m = 1; m <= n; ++m) {
      const Complex v = P(n, m) * std::polar(1.0, m * phi);
      y[n * n + n + m] = v;
      y[n * n + n - m] = (m % 2 ? -1.0 : 1.0) * std::conj(v);
    }
  }
  return y;
}

std::vector<Complex> propagate_exterior(std::span<const Complex> values,
                                        const SphereQuadrature& unit_rule,
                                        double R, double k, int L) {
  if (!(R > 1.0) || L < 1 || !(k > 0.0)) {
    throw DomainError("propagate_exterior: need R > 1, L >= 1, k > 0");
  }
  if (std::abs(unit_rule.radius - 1.0) > 1e-14) {
    throw DomainError("propagate_exterior: input rule must lie on the unit sphere");
  }
  if (values.size() != unit_rule.size()) {
    throw DomainError("propagate_exterior: one value per rule node");
  }
  const std::size_t modes = static_cast<std::size_t>((L + 1) * (L + 1));
  std::vector<std::vector<Complex>> ylm(unit_rule.size());
  std::vector<Complex> coef(modes);
  for (std::size_t i = 0; i < unit_rule.size(); ++i) {
    ylm[i] = spherical_harmonics(L, unit_rule.nodes[i]);
    const Complex wf = unit_rule.weights[i] * values[i];
    for (std::size_t j = 0; j < modes; ++j) coef[j] += wf * std::conj(ylm[i][j]);
  }

  const auto h1 = spherical_hankel1(L, k);
  const auto hR = spherical_hankel1(L, k * R);
  for (int n = 0; n <= L; ++n) {
    const Complex ratio = hR[n] / h1[n];
    if (!std::isfinite(ratio.real()) || !std::isfinite(ratio.imag())) {
      throw DomainError("propagate_exterior: non-finite Hankel ratio");
    }
    for (int m = -n; m <= n; ++m) coef[n * n + n + m] *= ratio;
  }

  std::vector<Complex> out(unit_rule.size());
  for (std::size_t i = 0; i < unit_rule.size(); ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < modes; ++j) acc += coef[j] * ylm[i][j];
    out[i] = acc;
  }
  return out;
}

}  // namespace rsi
