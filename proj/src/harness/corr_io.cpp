#include "rsi/harness/corr_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace rsi::harness {
namespace {

constexpr char kCorrMagic[6] = {'C', 'O', 'R', 'R', '1', '\0'};
constexpr char kMeshMagic[6] = {'M', 'E', 'S', 'H', '1', '\0'};

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto b = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
    std::reverse(b.begin(), b.end());
    return std::bit_cast<T>(b);
  }
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const T le = to_le(v);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&le);
    out.insert(out.end(), p, p + sizeof(T));
  }
  void raw(const char* p, std::size_t n) { out.insert(out.end(), p, p + n); }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes(b) {}
  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes.data() + pos, sizeof(T));
    pos += sizeof(T);
    return to_le(v);
  }
  double finite(const char* what) {
    const double v = get<double>(what);
    if (!std::isfinite(v)) throw IoError(std::string("CORR1: non-finite ") + what);
    return v;
  }
  bool magic(const char (&m)[6]) {
    if (bytes.size() - pos < 6 || std::memcmp(bytes.data() + pos, m, 6) != 0)
      return false;
    pos += 6;
    return true;
  }
  void need(std::size_t n, const char* what) const {
    if (bytes.size() - pos < n) {
      throw IoError(std::string("CORR1: truncated file while reading ") + what);
    }
  }
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void put_matrix(Writer& w, const std::vector<Complex>& f) {
  for (const Complex& z : f) {
    w.put(z.real());
    w.put(z.imag());
  }
}

std::vector<Complex> get_matrix(Reader& r, std::size_t n, const char* what) {
  r.need(n * n * 16, what);
  std::vector<Complex> f(n * n);
  for (auto& z : f) {
    const double re = r.finite(what);
    const double im = r.finite(what);
    z = {re, im};
  }
  return f;
}

}  // namespace

SphereQuadrature sphere_from_nodes(double R, std::vector<Vec3> nodes,
                                   std::vector<double> weights) {
  SphereQuadrature sq;
  sq.radius = R;
  const auto n = nodes.size();
  const int order = static_cast<int>(std::lround(std::sqrt(n / 2.0)));
  if (static_cast<std::size_t>(2 * order * order) == n) {
    sq.order = order;
    sq.n_theta = order;
    sq.n_phi = 2 * order;
  }
  sq.normals.reserve(n);
  for (const auto& x : nodes) sq.normals.push_back(x / x.norm());
  sq.nodes = std::move(nodes);
  sq.weights = std::move(weights);
  return sq;
}

std::vector<std::uint8_t> encode_corr1(const CorrelationSet& cs,
                                       const TetMesh* mesh) {
  if (!cs.sphere) throw IoError("CORR1: correlation set has no sphere");
  const std::size_t n = cs.n();
  Writer w;
  w.out.reserve(64 + n * 32 + 3 * n * n * 16);
  w.raw(kCorrMagic, 6);
  w.put(kCorr1Version);
  w.put(static_cast<std::uint32_t>(n));
  w.put(cs.sphere->radius);
  w.put(cs.k);
  for (const Vec3& x : cs.sphere->nodes) {
    w.put(x.x());
    w.put(x.y());
    w.put(x.z());
  }
  for (double wi : cs.sphere->weights) w.put(wi);
  put_matrix(w, cs.f1);
  put_matrix(w, cs.f2);
  put_matrix(w, cs.f3);
  w.put(cs.M);
  w.put(cs.n_realizations);
  w.put(static_cast<std::uint8_t>(cs.provenance));
  if (mesh != nullptr) {
    w.raw(kMeshMagic, 6);
    w.put(kMesh1Version);
    w.put(static_cast<std::int32_t>(mesh->refinement_level));
    w.put(static_cast<std::uint64_t>(mesh->vertices.size()));
    for (const Vec3& v : mesh->vertices) {
      w.put(v.x());
      w.put(v.y());
      w.put(v.z());
    }
    w.put(static_cast<std::uint64_t>(mesh->tets.size()));
    for (const auto& t : mesh->tets)
      for (std::int32_t i : t) w.put(i);
  }
  return std::move(w.out);
}

Dataset decode_corr1(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (!r.magic(kCorrMagic)) throw IoError("CORR1: bad magic (not a CORR1 file)");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCorr1Version) {
    throw IoError("CORR1: unsupported version " + std::to_string(version));
  }
  const auto n = r.get<std::uint32_t>("node count");
  const double R = r.finite("R");
  const double k = r.finite("k");
  r.need(std::size_t{n} * 32, "nodes");
  std::vector<Vec3> nodes(n);
  for (auto& x : nodes) {
    const double a = r.finite("node");
    const double b = r.finite("node");
    const double c = r.finite("node");
    x = Vec3(a, b, c);
  }
  std::vector<double> weights(n);
  for (auto& wi : weights) wi = r.finite("weight");

  Dataset ds;
  CorrelationSet& cs = ds.correlations;
  cs.sphere = std::make_shared<const SphereQuadrature>(
      sphere_from_nodes(R, std::move(nodes), std::move(weights)));
  cs.k = k;
  cs.f1 = get_matrix(r, n, "F1");
  cs.f2 = get_matrix(r, n, "F2");
  cs.f3 = get_matrix(r, n, "F3");
  cs.M = r.finite("M");
  cs.n_realizations = r.get<std::uint64_t>("n_realizations");
  const auto prov = r.get<std::uint8_t>("provenance");
  if (prov > static_cast<std::uint8_t>(Provenance::kPerturbed)) {
    throw IoError("CORR1: unknown provenance code " + std::to_string(prov));
  }
  cs.provenance = static_cast<Provenance>(prov);

  if (r.pos == bytes.size()) return ds;
  if (!r.magic(kMeshMagic)) throw IoError("CORR1: trailing bytes after payload");
  const auto mversion = r.get<std::uint32_t>("mesh version");
  if (mversion != kMesh1Version) {
    throw IoError("MESH1: unsupported version " + std::to_string(mversion));
  }
  TetMesh mesh;
  mesh.refinement_level = r.get<std::int32_t>("mesh level");
  const auto nv = r.get<std::uint64_t>("vertex count");
  r.need(nv * 24, "vertices");
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices) {
    const double a = r.finite("vertex");
    const double b = r.finite("vertex");
    const double c = r.finite("vertex");
    v = Vec3(a, b, c);
  }
  const auto nt = r.get<std::uint64_t>("tet count");
  r.need(nt * 16, "tets");
  mesh.tets.resize(nt);
  for (auto& t : mesh.tets) {
    for (auto& i : t) {
      i = r.get<std::int32_t>("tet");
      if (i < 0 || static_cast<std::uint64_t>(i) >= nv) {
        throw IoError("MESH1: vertex index out of range");
      }
    }
  }
  if (r.pos != bytes.size()) throw IoError("MESH1: trailing bytes after mesh");
  compute_tet_geometry(mesh);
  ds.mesh = std::move(mesh);
  return ds;
}

void write_corr1(const std::string& path, const CorrelationSet& cs,
                 const TetMesh* mesh) {
  const auto bytes = encode_corr1(cs, mesh);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed for '" + path + "'");
}

Dataset read_corr1(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_corr1(bytes);
}

}  // namespace rsi::harness
