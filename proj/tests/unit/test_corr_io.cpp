#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "rsi/harness/corr_io.hpp"

using namespace rsi;
using namespace rsi::harness;

namespace {

CorrelationSet sample_set() {
  const TetMesh mesh = build_ball_mesh(0);
  StrengthField f;
  f.bumps.push_back({Vec3(0.1, 0.0, 0.0), 0.6, 1.0});
  auto sq = std::make_shared<const SphereQuadrature>(build_sphere_quadrature(1.5, 4));
  CorrelationSet cs = exact_correlations_homogeneous(mesh, f, sq, 3.0);
  cs.n_realizations = 17;
  return cs;
}

template <typename T>
T read_at(const std::vector<std::uint8_t>& b, std::size_t off) {
  T v;
  std::memcpy(&v, b.data() + off, sizeof(T));
  return v;
}

}  // namespace

TEST_CASE("CORR1 layout") {
  const CorrelationSet cs = sample_set();
  const auto b = encode_corr1(cs);
  const std::size_t n = cs.n();
  CHECK(std::memcmp(b.data(), "CORR1\0", 6) == 0);
  CHECK(read_at<std::uint32_t>(b, 6) == 1u);
  CHECK(read_at<std::uint32_t>(b, 10) == n);
  CHECK(read_at<double>(b, 14) == 1.5);
  CHECK(read_at<double>(b, 22) == 3.0);
  CHECK(read_at<double>(b, 30) == cs.sphere->nodes[0].x());
  const std::size_t f1 = 30 + 32 * n;
  CHECK(read_at<double>(b, 30 + 24 * n) == cs.sphere->weights[0]);
  CHECK(read_at<double>(b, f1) == cs.f1[0].real());
  CHECK(read_at<double>(b, f1 + 8) == cs.f1[0].imag());
  const std::size_t tail = f1 + 3 * 16 * n * n;
  CHECK(read_at<double>(b, tail) == cs.M);
  CHECK(read_at<std::uint64_t>(b, tail + 8) == 17u);
  CHECK(b[tail + 16] == static_cast<std::uint8_t>(Provenance::kExactHomogeneous));
  CHECK(b.size() == tail + 17);
}

TEST_CASE("CORR1 round trip, with and without mesh") {
  const CorrelationSet cs = sample_set();
  const Dataset d = decode_corr1(encode_corr1(cs));
  CHECK_FALSE(d.mesh.has_value());
  CHECK(d.correlations.f1 == cs.f1);
  CHECK(d.correlations.f2 == cs.f2);
  CHECK(d.correlations.f3 == cs.f3);
  CHECK(d.correlations.M == cs.M);
  CHECK(d.correlations.k == cs.k);
  CHECK(d.correlations.n_realizations == 17u);
  CHECK(d.correlations.provenance == cs.provenance);
  CHECK(d.correlations.sphere->nodes == cs.sphere->nodes);
  CHECK(d.correlations.sphere->order == 4);

  const TetMesh mesh = build_ball_mesh(1);
  const Dataset dm = decode_corr1(encode_corr1(cs, &mesh));
  REQUIRE(dm.mesh.has_value());
  CHECK(dm.mesh->tets == mesh.tets);
  CHECK(dm.mesh->volumes == mesh.volumes);
  CHECK(dm.mesh->refinement_level == 1);
  CHECK(encode_corr1(dm.correlations, &*dm.mesh) == encode_corr1(cs, &mesh));

  const auto path = std::filesystem::temp_directory_path() / "rsi_corr_io_test.bin";
  write_corr1(path.string(), cs, &mesh);
  CHECK(read_corr1(path.string()).correlations.f2 == cs.f2);
  std::filesystem::remove(path);
}

TEST_CASE("CORR1 rejects malformed input") {
  const CorrelationSet cs = sample_set();
  const auto good = encode_corr1(cs);
  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_corr1(bad), doctest::Contains("bad magic"), IoError);
  bad = good;
  bad[6] = 2;
  CHECK_THROWS_WITH_AS(decode_corr1(bad), doctest::Contains("version"), IoError);
  bad = std::vector<std::uint8_t>(good.begin(), good.end() - 5);
  CHECK_THROWS_WITH_AS(decode_corr1(bad), doctest::Contains("truncated"), IoError);
  bad = good;
  bad.push_back(0);
  CHECK_THROWS_WITH_AS(decode_corr1(bad), doctest::Contains("trailing"), IoError);
  bad = good;
  bad.back() = 9;
  CHECK_THROWS_WITH_AS(decode_corr1(bad), doctest::Contains("provenance"), IoError);
  bad = good;
  const double nan = std::nan("");
  std::memcpy(bad.data() + 14, &nan, 8);
  CHECK_THROWS_WITH_AS(decode_corr1(bad), doctest::Contains("non-finite"), IoError);
  CHECK_THROWS_AS(decode_corr1(std::vector<std::uint8_t>{}), IoError);
  CHECK_THROWS_AS(read_corr1("/nonexistent/corr.bin"), IoError);

  const TetMesh mesh = build_ball_mesh(0);
  auto withmesh = encode_corr1(cs, &mesh);
  // Last tet index out of range.
  const std::int32_t huge = 1 << 30;
  std::memcpy(withmesh.data() + withmesh.size() - 4, &huge, 4);
  CHECK_THROWS_WITH_AS(decode_corr1(withmesh), doctest::Contains("out of range"), IoError);
}
