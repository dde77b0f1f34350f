#include <doctest.h>

#include <random>
#include <vector>

#include "rsi/simd/kernels.hpp"

using namespace rsi;

namespace {

std::vector<Complex> random_complex(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

// Sizes straddle the 2- and 4-lane widths and their remainders.
const std::size_t kShapes[][2] = {{1, 1}, {3, 5}, {4, 4}, {7, 9}, {33, 17}, {64, 130}};

}  // namespace

TEST_CASE("scalar kernels against naive loops") {
  std::mt19937_64 rng(3);
  const auto& s = simd::detail::scalar_table();
  for (auto [r, c] : kShapes) {
    const auto a = random_complex(r * c, rng);
    const auto x = random_complex(c, rng);
    const auto l = random_complex(r, rng);
    std::vector<Complex> y(r);
    s.cgemv(a.data(), r, c, x.data(), y.data());
    Complex bil{};
    for (std::size_t i = 0; i < r; ++i) {
      Complex acc{};
      for (std::size_t j = 0; j < c; ++j) acc += a[i * c + j] * x[j];
      CHECK(rel(y[i], acc) < 1e-13);
      bil += l[i] * acc;
    }
    CHECK(rel(s.cbilinear(a.data(), r, c, l.data(), x.data()), bil) < 1e-12);

    std::vector<double> wr(r), wc(c);
    for (auto& w : wr) w = std::uniform_real_distribution<double>(0, 1)(rng);
    for (auto& w : wc) w = std::uniform_real_distribution<double>(0, 1)(rng);
    double ref = 0.0;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) ref += wr[i] * wc[j] * std::norm(a[i * c + j]);
    CHECK(std::abs(s.weighted_abs2(a.data(), r, c, wr.data(), wc.data()) - ref) <= 1e-12 * ref);
  }
}

TEST_CASE("compensated rank-1 sums keep the rounding error") {
  const auto& s = simd::detail::scalar_table();
  // 1 + 1e-16 * n: plain summation loses every increment.
  std::vector<Complex> sum(1, Complex(1.0, 0.0)), comp(1);
  const Complex u(1e-16, 0.0), v(1.0, 0.0);
  for (int i = 0; i < 1000; ++i) s.rank1_compensated(sum.data(), comp.data(), 1, 1, &u, &v);
  CHECK((sum[0] + comp[0]).real() == doctest::Approx(1.0 + 1e-13).epsilon(1e-15));
}

TEST_CASE("avx2 kernels match the scalar reference") {
  if (simd::detail::avx2_table() == nullptr || !simd::backend_available(simd::Backend::kAvx2)) {
    MESSAGE("avx2 backend unavailable; equivalence not exercised");
    return;
  }
  const auto& s = simd::detail::scalar_table();
  const auto& v = *simd::detail::avx2_table();
  std::mt19937_64 rng(11);
  for (auto [r, c] : kShapes) {
    const auto a = random_complex(r * c, rng);
    const auto x = random_complex(c, rng);
    const auto l = random_complex(r, rng);
    std::vector<Complex> ys(r), yv(r);
    s.cgemv(a.data(), r, c, x.data(), ys.data());
    v.cgemv(a.data(), r, c, x.data(), yv.data());
    for (std::size_t i = 0; i < r; ++i) CHECK(rel(yv[i], ys[i]) < 1e-13);
    CHECK(rel(v.cbilinear(a.data(), r, c, l.data(), x.data()),
              s.cbilinear(a.data(), r, c, l.data(), x.data())) < 1e-12);

    // Elementwise kernels: bitwise identical.
    std::vector<Complex> s1(r * c), c1(r * c), s2(r * c), c2(r * c), q1(r * c), q2(r * c);
    for (int rep = 0; rep < 3; ++rep) {
      s.rank1_compensated(s1.data(), c1.data(), r, c, l.data(), x.data());
      v.rank1_compensated(s2.data(), c2.data(), r, c, l.data(), x.data());
      s.rank1_squares(q1.data(), r, c, l.data(), x.data());
      v.rank1_squares(q2.data(), r, c, l.data(), x.data());
    }
    CHECK(s1 == s2);
    CHECK(c1 == c2);
    CHECK(q1 == q2);

    std::vector<double> are(r * c), aim(r * c), xr(c), wr(r), wc(c);
    for (std::size_t i = 0; i < r * c; ++i) are[i] = a[i].real(), aim[i] = a[i].imag();
    for (std::size_t j = 0; j < c; ++j) xr[j] = x[j].real(), wc[j] = 0.5 + 0.1 * j;
    for (std::size_t i = 0; i < r; ++i) wr[i] = 1.0 + 0.01 * i;
    s.planar_gemv_real(are.data(), aim.data(), r, c, xr.data(), ys.data());
    v.planar_gemv_real(are.data(), aim.data(), r, c, xr.data(), yv.data());
    for (std::size_t i = 0; i < r; ++i) CHECK(rel(yv[i], ys[i]) < 1e-13);
    const double ws = s.weighted_abs2(a.data(), r, c, wr.data(), wc.data());
    CHECK(std::abs(v.weighted_abs2(a.data(), r, c, wr.data(), wc.data()) - ws) <= 1e-13 * ws);
  }
}

TEST_CASE("backend selection") {
  const auto before = simd::active_backend();
  simd::set_backend(simd::Backend::kScalar);
  CHECK(simd::active_backend() == simd::Backend::kScalar);
  CHECK(simd::backend_name(simd::Backend::kScalar) == "scalar");
  if (!simd::backend_available(simd::Backend::kAvx2)) {
    CHECK_THROWS_AS(simd::set_backend(simd::Backend::kAvx2), ConfigError);
  }
  simd::set_backend(before);
}
