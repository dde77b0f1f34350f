#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rsi/geometry/mesh.hpp"

namespace rsi {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// the output is a pure function of (key, counter).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key);
};

/// Identifies one independent Gaussian stream: a run seed, a realization index
/// and a purpose tag separating draws made for different uses.
struct NoiseStream {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::uint32_t purpose = 0;

  /// Fills out[0..n) with independent standard normals (Box-Muller on
  /// 53-bit uniforms).
  void normals(double* out, std::size_t n) const;
};

/// Piecewise-constant white noise on a mesh: zeta_j ~ N(0, |K_j|),
/// independent across tetrahedra.
struct WhiteNoiseRealization {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t mesh_id = 0;
  std::vector<double> increments;
};

WhiteNoiseRealization sample_white_noise(const TetMesh& mesh,
                                         std::uint64_t seed,
                                         std::uint64_t stream = 0);

/// Conditionally samples increments on a refinement of the realization's mesh
/// so that the fine increments over each coarse tetrahedron sum exactly to the
/// coarse increment:
///   zeta_i = (v_i/V) zeta_c + Z_i - (v_i/V) sum_l Z_l,  Z_l ~ N(0, v_l),
/// with v_i the child volumes and V their sum. Throws DomainError when
/// `fine_mesh` is not a refinement of the realization's mesh.
WhiteNoiseRealization refine_noise(const WhiteNoiseRealization& coarse,
                                   const TetMesh& coarse_mesh,
                                   const TetMesh& fine_mesh);

}  // namespace rsi
