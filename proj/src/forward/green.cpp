#include "rsi/forward/green.hpp"

#include <cmath>

namespace rsi {

Complex green(double k, const Vec3& x, const Vec3& y) {
  const double r = (x - y).norm();
  if (r == 0.0) {
    throw SingularityError("green: coincident points; use the self-cell rule");
  }
  const double kr = k * r;
  return Complex(-std::cos(kr), -std::sin(kr)) / (4.0 * kPi * r);
}

CVec3 green_gradient(double k, const Vec3& x, const Vec3& y) {
  const Vec3 d = x - y;
  const double r = d.norm();
  const Complex g = green(k, x, y);
  const Complex radial = g * Complex(-1.0 / r, k) / r;
  return d.cast<Complex>() * radial;
}

Complex green_normal_derivative(double k, const Vec3& x, const Vec3& y,
                                const Vec3& nu) {
  const Vec3 d = x - y;
  const double r = d.norm();
  const Complex g = green(k, x, y);
  return g * Complex(-1.0 / r, k) * (nu.dot(d) / r);
}

Complex self_cell_integral(double k, double volume) {
  const double a = std::cbrt(3.0 * volume / (4.0 * kPi));
  const double ka = k * a;
  if (ka < 0.5) {
    // int_0^a r e^{ikr} dr = a^2 sum_n (i k a)^n / (n! (n + 2))
    Complex term = 1.0, sum = 0.0;
    for (int n = 0; n < 40; ++n) {
      sum += term / double(n + 2);
      term *= Complex(0.0, ka) / double(n + 1);
      if (std::abs(term) < 1e-18) break;
    }
    return -a * a * sum;
  }
  const Complex e = std::polar(1.0, ka);
  // [e^{ikr} (r/(ik) + 1/k^2)]_0^a
  const Complex integral =
      e * (Complex(0.0, -a / k) + 1.0 / (k * k)) - 1.0 / (k * k);
  return -integral;
}

}  // namespace rsi
