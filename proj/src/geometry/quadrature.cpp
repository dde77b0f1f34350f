#include "rsi/geometry/quadrature.hpp"

#include <cmath>
#include <map>
#include <string>

namespace rsi {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("Gauss-Legendre rule needs n >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

double SphereQuadrature::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

SphereQuadrature build_sphere_rule(double radius, int order) {
  if (order < 4) {
    throw ConfigError("sphere quadrature order must be >= 4, got " +
                      std::to_string(order));
  }
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  SphereQuadrature q;
  q.radius = radius;
  q.order = order;
  q.n_theta = order;
  q.n_phi = 2 * order;
  const GaussRule gl = gauss_legendre(order);
  const double dphi = 2.0 * kPi / q.n_phi;
  q.nodes.reserve(static_cast<std::size_t>(q.n_theta) * q.n_phi);
  for (int a = 0; a < q.n_theta; ++a) {
    const double ct = gl.nodes[a];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int b = 0; b < q.n_phi; ++b) {
      const double phi = b * dphi;
      const Vec3 dir(st * std::cos(phi), st * std::sin(phi), ct);
      const Vec3 normal = dir.normalized();
      q.normals.push_back(normal);
      q.nodes.push_back(radius * normal);
      q.weights.push_back(radius * radius * gl.weights[a] * dphi);
    }
  }
  return q;
}

SphereQuadrature build_sphere_quadrature(double R, int order) {
  if (!(R > 1.0)) {
    throw DomainError("measurement radius R must exceed 1 (source support is "
                      "the unit ball), got " + std::to_string(R));
  }
  return build_sphere_rule(R, order);
}

double FrequencyGrid::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

FrequencyGrid build_frequency_grid(double rho, double spacing) {
  if (!(rho > 0.0)) throw ConfigError("frequency radius rho must be positive");
  if (!(spacing > 0.0) || spacing > rho / 2.0) {
    throw ConfigError("frequency spacing must lie in (0, rho/2]; got spacing " +
                      std::to_string(spacing) + " for rho " +
                      std::to_string(rho));
  }
  constexpr int kSub = 8;
  const double h = spacing;
  const double cell = h * h * h;
  const double half_diag = 0.5 * std::sqrt(3.0) * h;
  const int nmax = static_cast<int>(std::ceil(rho / h)) + 1;

  std::map<std::array<int, 3>, double> weight;
  auto inside = [&](int i, int j, int l) {
    return std::hypot(i * h, j * h, l * h) <= rho;
  };
  for (int i = -nmax; i <= nmax; ++i) {
    for (int j = -nmax; j <= nmax; ++j) {
      for (int l = -nmax; l <= nmax; ++l) {
        const Vec3 c(i * h, j * h, l * h);
        const double r = c.norm();
        if (r - half_diag > rho) continue;
        double covered;
        if (r + half_diag <= rho) {
          covered = cell;
        } else {
          int count = 0;
          for (int a = 0; a < kSub; ++a)
            for (int b = 0; b < kSub; ++b)
              for (int e = 0; e < kSub; ++e) {
                const Vec3 p = c + h * Vec3((a + 0.5) / kSub - 0.5,
                                            (b + 0.5) / kSub - 0.5,
                                            (e + 0.5) / kSub - 0.5);
                if (p.norm() <= rho) ++count;
              }
          if (count == 0) continue;
          covered = cell * count / (kSub * kSub * kSub);
        }
        std::array<int, 3> target{i, j, l};
        if (!inside(i, j, l)) {
          // Pull the node radially inward far enough that rounding back onto
          // the lattice cannot leave the ball; std::round is odd-symmetric.
          const Vec3 p = c * ((rho - half_diag) / r) / h;
          target = {static_cast<int>(std::round(p(0))),
                    static_cast<int>(std::round(p(1))),
                    static_cast<int>(std::round(p(2)))};
        }
        weight[target] += covered;
      }
    }
  }

  FrequencyGrid grid;
  grid.rho = rho;
  grid.spacing = spacing;
  std::map<std::array<int, 3>, std::size_t> index;
  for (const auto& [key, w] : weight) {
    index[key] = grid.nodes.size();
    grid.lattice.push_back(key);
    grid.nodes.emplace_back(key[0] * h, key[1] * h, key[2] * h);
    grid.weights.push_back(w);
  }
  grid.mirror.resize(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto& key = grid.lattice[n];
    grid.mirror[n] = index.at({-key[0], -key[1], -key[2]});
  }
  const double exact = 4.0 * kPi * rho * rho * rho / 3.0;
  grid.volume_error = (grid.weight_sum() - exact) / exact;
  return grid;
}

}  // namespace rsi
