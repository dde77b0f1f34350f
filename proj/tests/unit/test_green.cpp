#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rsi/forward/green.hpp"

using namespace rsi;

TEST_CASE("green function values and reciprocity") {
  const Vec3 x(1.2, -0.3, 0.4), y(0.1, 0.2, -0.3);
  const double r = (x - y).norm();
  const Complex g = green(5.0, x, y);
  CHECK(std::abs(g + std::exp(kI * 5.0 * r) / (4.0 * kPi * r)) < 1e-16);
  CHECK(g == green(5.0, y, x));
  CHECK_THROWS_AS(green(5.0, x, x), SingularityError);
}

TEST_CASE("gradient and normal derivative against central differences") {
  const double k = 7.0, h = 1e-5;
  const Vec3 y(0.1, 0.2, -0.3);
  for (const Vec3& x : {Vec3(1.2, -0.3, 0.4), Vec3(0.0, 1.5, 0.0), Vec3(-0.9, -0.9, 0.6)}) {
    const CVec3 grad = green_gradient(k, x, y);
    for (int a = 0; a < 3; ++a) {
      Vec3 e = Vec3::Zero();
      e(a) = h;
      const Complex fd = (green(k, x + e, y) - green(k, x - e, y)) / (2.0 * h);
      CHECK(std::abs(grad(a) - fd) <= 1e-6 * grad.norm());
    }
    const Vec3 nu = x.normalized();
    const Complex dn = green_normal_derivative(k, x, y, nu);
    const Complex fd = (green(k, x + h * nu, y) - green(k, x - h * nu, y)) / (2.0 * h);
    CHECK(std::abs(dn - fd) <= 1e-6 * std::abs(dn));
  }
}

TEST_CASE("green function solves the Helmholtz equation away from the pole") {
  const double k = 4.0, h = 1e-3;
  const Vec3 x(0.7, 0.2, -0.1), y = Vec3::Zero();
  Complex lap = -6.0 * green(k, x, y);
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e(a) = h;
    lap += green(k, x + e, y) + green(k, x - e, y);
  }
  lap /= h * h;
  CHECK(std::abs(lap + k * k * green(k, x, y)) < 1e-4 * k * k * std::abs(green(k, x, y)));
}

TEST_CASE("self-cell integral against adaptive quadrature") {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (double k : {0.5, 5.0, 20.0})
    for (double vol : {1e-6, 1e-3, 0.05, 0.4}) {
      const double a = std::cbrt(3.0 * vol / (4.0 * kPi));
      const double re = -GK::integrate([k](double r) { return r * std::cos(k * r); }, 0.0, a, 20, 1e-15);
      const double im = -GK::integrate([k](double r) { return r * std::sin(k * r); }, 0.0, a, 20, 1e-15);
      const Complex s = self_cell_integral(k, vol);
      CHECK(std::abs(s - Complex(re, im)) <= 1e-12);
    }
}
