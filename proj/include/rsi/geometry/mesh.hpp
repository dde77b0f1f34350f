#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rsi/common.hpp"

namespace rsi {

/// Tetrahedral mesh of the unit ball.
///
/// Level 0 is the cone from the origin over the once-subdivided icosahedron
/// (80 tetrahedra). Every further level applies red refinement (8 children per
/// tetrahedron) and projects new boundary vertices radially onto the unit
/// sphere, so the mesh is inscribed in B1 and h_max halves per level.
///
/// Children of tetrahedron p at level L are stored at indices 8p .. 8p+7 of
/// level L+1, so tet j of level L+d descends from tet (j >> 3d) of level L.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::int32_t, 4>> tets;
  std::vector<double> volumes;
  std::vector<Vec3> centroids;
  double h_max = 0.0;
  int refinement_level = 0;

  std::size_t size() const { return tets.size(); }
  double total_volume() const;
  /// Identifier shared by every mesh built with the same level.
  std::uint64_t mesh_id() const;
};

inline constexpr int kMaxRefinementLevel = 6;

/// Throws ConfigError for levels outside [0, kMaxRefinementLevel].
TetMesh build_ball_mesh(int refinement_level);

/// One red-refinement step with boundary projection.
TetMesh refine_mesh(const TetMesh& coarse);

/// Signed volume of the tetrahedron (a, b, c, d).
double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c,
                         const Vec3& d);

/// Recomputes volumes, centroids and h_max from vertices and tets.
void compute_tet_geometry(TetMesh& mesh);

/// Index of the tetrahedron containing x, or -1. Linear scan; tests only.
std::int64_t locate_point(const TetMesh& mesh, const Vec3& x,
                          double tol = 1e-12);

/// True when `fine` descends from `coarse` by whole refinement steps.
bool is_nested_refinement(const TetMesh& coarse, const TetMesh& fine);

}  // namespace rsi
