#pragma once

#include <array>
#include <vector>

#include "rsi/common.hpp"

namespace rsi {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

/// n-point Gauss-Legendre rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

/// Tensor-product rule on the sphere |x| = R: `order` Gauss-Legendre nodes in
/// cos(theta) times 2*order uniform nodes in phi. Exact for spherical
/// polynomials of degree <= 2*order - 1.
struct SphereQuadrature {
  double radius = 1.0;
  int order = 0;
  int n_theta = 0;
  int n_phi = 0;
  std::vector<Vec3> nodes;
  std::vector<Vec3> normals;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  int exactness_degree() const { return 2 * order - 1; }
  double weight_sum() const;
};

/// Measurement sphere. Throws DomainError for R <= 1 and ConfigError for
/// order < 4.
SphereQuadrature build_sphere_quadrature(double R, int order);

/// Same construction on an arbitrary radius, without the measurement-sphere
/// precondition (used for the unit sphere in exterior propagation).
SphereQuadrature build_sphere_rule(double radius, int order);

/// Cartesian quadrature of the frequency ball |gamma| <= rho.
///
/// Nodes sit on the lattice spacing * Z^3. A cell fully inside the ball has
/// weight spacing^3; boundary cells are sub-sampled and their covered volume
/// is credited to the cell's own node when that node lies in the ball, and to
/// the nearest lattice node inside the ball otherwise. The construction is
/// symmetric under gamma -> -gamma.
struct FrequencyGrid {
  double rho = 0.0;
  double spacing = 0.0;
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 3>> lattice;
  std::vector<double> weights;
  std::vector<std::size_t> mirror;  // index of -gamma_i
  double volume_error = 0.0;        // (sum w - 4 pi rho^3 / 3) / (4 pi rho^3 / 3)

  std::size_t size() const { return nodes.size(); }
  double weight_sum() const;
};

/// Throws ConfigError unless rho > 0 and 0 < spacing <= rho / 2.
FrequencyGrid build_frequency_grid(double rho, double spacing);

}  // namespace rsi
