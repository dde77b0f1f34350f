#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsi/correlation/correlation.hpp"
#include "rsi/geometry/mesh.hpp"

namespace rsi::harness {

// CORR1 layout (all little-endian):
//   "CORR1\0", u32 version, u32 n, f64 R, f64 k, nodes (3n f64),
//   weights (n f64), F1, F2, F3 (n^2 complex each as f64 pairs, row-major),
//   f64 M, u64 n_realizations, u8 provenance.
// An optional section may follow:
//   "MESH1\0", u32 version, i32 refinement level, u64 vertex count,
//   vertices (3 f64 each), u64 tet count, tets (4 i32 each).
// Readers that predate the mesh section stop after the provenance byte.

inline constexpr std::uint32_t kCorr1Version = 1;
inline constexpr std::uint32_t kMesh1Version = 1;

struct Dataset {
  CorrelationSet correlations;
  std::optional<TetMesh> mesh;
};

std::vector<std::uint8_t> encode_corr1(const CorrelationSet& cs,
                                       const TetMesh* mesh = nullptr);

/// Throws IoError on bad magic, unsupported version, truncation, trailing
/// garbage or non-finite payload.
Dataset decode_corr1(std::span<const std::uint8_t> bytes);

void write_corr1(const std::string& path, const CorrelationSet& cs,
                 const TetMesh* mesh = nullptr);
Dataset read_corr1(const std::string& path);

/// Sphere rule recovered from stored nodes and weights; `order` is inferred
/// when the node count is 2 order^2 and left 0 otherwise.
SphereQuadrature sphere_from_nodes(double R, std::vector<Vec3> nodes,
                                   std::vector<double> weights);

}  // namespace rsi::harness
