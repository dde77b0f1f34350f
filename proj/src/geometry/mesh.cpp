#include "rsi/geometry/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace rsi {
namespace {

using Tet = std::array<std::int32_t, 4>;

std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct FaceKey {
  std::array<std::int32_t, 3> v;
  bool operator==(const FaceKey&) const = default;
};

struct FaceHash {
  std::size_t operator()(const FaceKey& f) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : f.v) {
      h ^= static_cast<std::uint64_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

FaceKey sorted_face(std::int32_t a, std::int32_t b, std::int32_t c) {
  std::array<std::int32_t, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return {v};
}

void finalize(TetMesh& mesh) {
  const std::size_t n = mesh.tets.size();
  mesh.volumes.resize(n);
  mesh.centroids.resize(n);
  double h = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto& tet = mesh.tets[t];
    const Vec3& a = mesh.vertices[tet[0]];
    const Vec3& b = mesh.vertices[tet[1]];
    const Vec3& c = mesh.vertices[tet[2]];
    const Vec3& d = mesh.vertices[tet[3]];
    mesh.volumes[t] = std::abs(signed_tet_volume(a, b, c, d));
    mesh.centroids[t] = 0.25 * (a + b + c + d);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        h = std::max(h, (mesh.vertices[tet[i]] - mesh.vertices[tet[j]]).norm());
  }
  mesh.h_max = h;
}

// Cone from the origin over the icosahedron subdivided once, all surface
// vertices on the unit sphere.
TetMesh base_mesh() {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> sv = {{-1, p, 0}, {1, p, 0},   {-1, -p, 0}, {1, -p, 0},
                          {0, -1, p}, {0, 1, p},   {0, -1, -p}, {0, 1, -p},
                          {p, 0, -1}, {p, 0, 1},   {-p, 0, -1}, {-p, 0, 1}};
  for (auto& v : sv) v.normalize();
  const std::vector<std::array<int, 3>> ico = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  std::unordered_map<std::uint64_t, int> mids;
  auto midpoint = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = mids.find(key); it != mids.end()) return it->second;
    sv.push_back((sv[a] + sv[b]).normalized());
    const int id = static_cast<int>(sv.size()) - 1;
    mids.emplace(key, id);
    return id;
  };
  std::vector<std::array<int, 3>> faces;
  for (const auto& f : ico) {
    const int ab = midpoint(f[0], f[1]);
    const int bc = midpoint(f[1], f[2]);
    const int ca = midpoint(f[2], f[0]);
    faces.push_back({f[0], ab, ca});
    faces.push_back({f[1], bc, ab});
    faces.push_back({f[2], ca, bc});
    faces.push_back({ab, bc, ca});
  }

  TetMesh mesh;
  mesh.vertices.push_back(Vec3::Zero());
  for (const auto& v : sv) mesh.vertices.push_back(v);
  for (const auto& f : faces) mesh.tets.push_back({0, f[0] + 1, f[1] + 1, f[2] + 1});
  mesh.refinement_level = 0;
  finalize(mesh);
  return mesh;
}

}  // namespace

double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c,
                         const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

double TetMesh::total_volume() const {
  double s = 0.0;
  for (double v : volumes) s += v;
  return s;
}

void compute_tet_geometry(TetMesh& mesh) { finalize(mesh); }

std::uint64_t TetMesh::mesh_id() const {
  return (static_cast<std::uint64_t>(refinement_level) << 48) ^
         static_cast<std::uint64_t>(tets.size());
}

TetMesh refine_mesh(const TetMesh& coarse) {
  // Edges lying on the boundary surface get their midpoints projected.
  std::unordered_map<FaceKey, int, FaceHash> face_count;
  face_count.reserve(coarse.tets.size() * 4);
  for (const auto& t : coarse.tets) {
    ++face_count[sorted_face(t[0], t[1], t[2])];
    ++face_count[sorted_face(t[0], t[1], t[3])];
    ++face_count[sorted_face(t[0], t[2], t[3])];
    ++face_count[sorted_face(t[1], t[2], t[3])];
  }
  std::unordered_set<std::uint64_t> boundary_edges;
  for (const auto& [f, count] : face_count) {
    if (count != 1) continue;
    boundary_edges.insert(edge_key(f.v[0], f.v[1]));
    boundary_edges.insert(edge_key(f.v[1], f.v[2]));
    boundary_edges.insert(edge_key(f.v[0], f.v[2]));
  }

  TetMesh fine;
  fine.vertices = coarse.vertices;
  fine.refinement_level = coarse.refinement_level + 1;
  fine.tets.reserve(coarse.tets.size() * 8);
  std::unordered_map<std::uint64_t, std::int32_t> mids;
  mids.reserve(coarse.tets.size() * 2);
  auto midpoint = [&](std::int32_t a, std::int32_t b) {
    const auto key = edge_key(a, b);
    if (auto it = mids.find(key); it != mids.end()) return it->second;
    Vec3 m = 0.5 * (fine.vertices[a] + fine.vertices[b]);
    if (boundary_edges.count(key)) m.normalize();
    fine.vertices.push_back(m);
    const auto id = static_cast<std::int32_t>(fine.vertices.size() - 1);
    mids.emplace(key, id);
    return id;
  };

  for (const auto& t : coarse.tets) {
    const std::int32_t x0 = t[0], x1 = t[1], x2 = t[2], x3 = t[3];
    const std::int32_t m01 = midpoint(x0, x1), m02 = midpoint(x0, x2),
                       m03 = midpoint(x0, x3), m12 = midpoint(x1, x2),
                       m13 = midpoint(x1, x3), m23 = midpoint(x2, x3);
    fine.tets.push_back({x0, m01, m02, m03});
    fine.tets.push_back({m01, x1, m12, m13});
    fine.tets.push_back({m02, m12, x2, m23});
    fine.tets.push_back({m03, m13, m23, x3});

    // Inner octahedron: split along its shortest diagonal. Opposite vertex
    // pairs are (m01,m23), (m02,m13), (m03,m12).
    const std::array<std::array<std::int32_t, 2>, 3> diag = {
        {{m01, m23}, {m02, m13}, {m03, m12}}};
    int best = 0;
    double best_len = 1e300;
    for (int d = 0; d < 3; ++d) {
      const double len =
          (fine.vertices[diag[d][0]] - fine.vertices[diag[d][1]]).norm();
      if (len < best_len - 1e-14) {
        best_len = len;
        best = d;
      }
    }
    const auto& axis = diag[best];
    const auto& b = diag[(best + 1) % 3];
    const auto& c = diag[(best + 2) % 3];
    const std::array<std::int32_t, 4> ring = {b[0], c[0], b[1], c[1]};
    for (int r = 0; r < 4; ++r)
      fine.tets.push_back({axis[0], axis[1], ring[r], ring[(r + 1) % 4]});
  }
  finalize(fine);
  return fine;
}

TetMesh build_ball_mesh(int refinement_level) {
  if (refinement_level < 0 || refinement_level > kMaxRefinementLevel) {
    throw ConfigError("refinement_level must lie in [0, " +
                      std::to_string(kMaxRefinementLevel) + "], got " +
                      std::to_string(refinement_level));
  }
  TetMesh mesh = base_mesh();
  for (int l = 0; l < refinement_level; ++l) mesh = refine_mesh(mesh);
  return mesh;
}

std::int64_t locate_point(const TetMesh& mesh, const Vec3& x, double tol) {
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    const auto& tet = mesh.tets[t];
    const Vec3& a = mesh.vertices[tet[0]];
    const Vec3& b = mesh.vertices[tet[1]];
    const Vec3& c = mesh.vertices[tet[2]];
    const Vec3& d = mesh.vertices[tet[3]];
    const double v = signed_tet_volume(a, b, c, d);
    const double l0 = signed_tet_volume(x, b, c, d) / v;
    const double l1 = signed_tet_volume(a, x, c, d) / v;
    const double l2 = signed_tet_volume(a, b, x, d) / v;
    const double l3 = 1.0 - l0 - l1 - l2;
    if (l0 >= -tol && l1 >= -tol && l2 >= -tol && l3 >= -tol)
      return static_cast<std::int64_t>(t);
  }
  return -1;
}

bool is_nested_refinement(const TetMesh& coarse, const TetMesh& fine) {
  const int d = fine.refinement_level - coarse.refinement_level;
  if (d < 0) return false;
  if (fine.size() != coarse.size() << (3 * d)) return false;
  // Vertices of the coarse mesh are kept in place and in order.
  if (fine.vertices.size() < coarse.vertices.size()) return false;
  for (std::size_t v = 0; v < coarse.vertices.size(); ++v)
    if (fine.vertices[v] != coarse.vertices[v]) return false;
  return true;
}

}  // namespace rsi
