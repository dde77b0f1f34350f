#include "rsi/fields/noise.hpp"

#include <cmath>

namespace rsi {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// Uniform in (0, 1) from two 32-bit words, 53 bits of resolution.
inline double uniform53(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void NoiseStream::normals(double* out, std::size_t n) const {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
  for (std::size_t block = 0; 2 * block < n; ++block) {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block), purpose,
                                  static_cast<std::uint32_t>(index),
                                  static_cast<std::uint32_t>(index >> 32)};
    const auto r = Philox4x32::generate(ctr, key);
    const double u1 = uniform53(r[0], r[1]);
    const double u2 = uniform53(r[2], r[3]);
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * kPi * u2;
    out[2 * block] = mag * std::cos(ang);
    if (2 * block + 1 < n) out[2 * block + 1] = mag * std::sin(ang);
  }
}

WhiteNoiseRealization sample_white_noise(const TetMesh& mesh,
                                         std::uint64_t seed,
                                         std::uint64_t stream) {
  WhiteNoiseRealization w;
  w.seed = seed;
  w.stream = stream;
  w.mesh_id = mesh.mesh_id();
  w.increments.resize(mesh.size());
  NoiseStream{seed, stream, 0}.normals(w.increments.data(), mesh.size());
  for (std::size_t j = 0; j < mesh.size(); ++j)
    w.increments[j] *= std::sqrt(mesh.volumes[j]);
  return w;
}

WhiteNoiseRealization refine_noise(const WhiteNoiseRealization& coarse,
                                   const TetMesh& coarse_mesh,
                                   const TetMesh& fine_mesh) {
  if (coarse.mesh_id != coarse_mesh.mesh_id() ||
      coarse.increments.size() != coarse_mesh.size()) {
    throw DomainError("refine_noise: realization does not belong to the "
                      "supplied coarse mesh");
  }
  if (!is_nested_refinement(coarse_mesh, fine_mesh) ||
      fine_mesh.refinement_level == coarse_mesh.refinement_level) {
    throw DomainError("refine_noise: fine mesh is not a refinement of the "
                      "coarse mesh");
  }
  const int depth = fine_mesh.refinement_level - coarse_mesh.refinement_level;
  const std::size_t group = std::size_t{1} << (3 * depth);

  WhiteNoiseRealization fine;
  fine.seed = coarse.seed;
  fine.stream = coarse.stream;
  fine.mesh_id = fine_mesh.mesh_id();
  fine.increments.resize(fine_mesh.size());

  // Purpose tag: which pair of levels this conditional draw belongs to.
  const auto purpose = static_cast<std::uint32_t>(
      0x10000u | (coarse_mesh.refinement_level << 8) |
      fine_mesh.refinement_level);
  std::vector<double> z(fine_mesh.size());
  NoiseStream{coarse.seed, coarse.stream, purpose}.normals(z.data(), z.size());

  for (std::size_t c = 0; c < coarse_mesh.size(); ++c) {
    const std::size_t first = c * group;
    double vsum = 0.0, zsum = 0.0;
    for (std::size_t i = first; i < first + group; ++i) {
      z[i] *= std::sqrt(fine_mesh.volumes[i]);
      vsum += fine_mesh.volumes[i];
      zsum += z[i];
    }
    const double excess = coarse.increments[c] - zsum;
    double assigned = 0.0;
    for (std::size_t i = first; i + 1 < first + group; ++i) {
      fine.increments[i] = z[i] + (fine_mesh.volumes[i] / vsum) * excess;
      assigned += fine.increments[i];
    }
    // The last child closes the sum exactly.
    fine.increments[first + group - 1] = coarse.increments[c] - assigned;
  }
  return fine;
}

}  // namespace rsi
