#include <doctest.h>

#include <cmath>

#include "rsi/forward/exterior.hpp"
#include "rsi/forward/forward.hpp"

using namespace rsi;

TEST_CASE("spherical Hankel functions against the standard library") {
  for (double z : {0.3, 1.0, 5.0, 12.5}) {
    const auto h = spherical_hankel1(15, z);
    REQUIRE(h.size() == 16u);
    for (unsigned n = 0; n <= 15; ++n) {
      const Complex ref(std::sph_bessel(n, z), std::sph_neumann(n, z));
      CHECK(std::abs(h[n] - ref) <= 1e-12 * std::abs(ref));
    }
  }
  CHECK_THROWS_AS(spherical_hankel1(3, 0.0), DomainError);
}

TEST_CASE("exterior propagation matches direct evaluation") {
  const TetMesh mesh = build_ball_mesh(1);
  const Density g = [](const Vec3& x) { return x.norm() < 0.6 ? 1.0 + x.x() : 0.0; };
  const SphereQuadrature unit = build_sphere_rule(1.0, 30);
  const double k = 4.0, R = 1.5;
  const auto inner = deterministic_field(mesh, g, k, unit.nodes);
  std::vector<Vec3> outer;
  for (const auto& x : unit.nodes) outer.push_back(R * x);
  const auto direct = deterministic_field(mesh, g, k, outer);
  double err[2];
  int i = 0;
  for (int L : {8, 20}) {
    const auto prop = propagate_exterior(inner, unit, R, k, L);
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < direct.size(); ++p) {
      num = std::max(num, std::abs(prop[p] - direct[p]));
      den = std::max(den, std::abs(direct[p]));
    }
    err[i++] = num / den;
  }
  CHECK(err[1] < 1e-6);
  CHECK(err[1] < err[0]);
}

TEST_CASE("exterior propagation preconditions") {
  const SphereQuadrature unit = build_sphere_rule(1.0, 10);
  const std::vector<Complex> v(unit.size(), Complex(1.0, 0.0));
  CHECK_THROWS_AS(propagate_exterior(v, unit, 1.0, 3.0, 5), DomainError);
  CHECK_THROWS_AS(propagate_exterior(v, unit, 1.5, 3.0, 0), DomainError);
  CHECK_THROWS_AS(propagate_exterior(std::vector<Complex>(3), unit, 1.5, 3.0, 5), DomainError);
  const SphereQuadrature big = build_sphere_rule(2.0, 10);
  CHECK_THROWS_AS(propagate_exterior(v, big, 1.5, 3.0, 5), DomainError);
}
