// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and is
// only entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include "rsi/simd/kernels.hpp"

namespace rsi::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Row dot product sum_j row_j x_j; returns (re, im).
inline void row_dot(const Complex* row, const Complex* x, std::size_t cols,
                    double& out_re, double& out_im) {
  const auto* a = reinterpret_cast<const double*>(row);
  const auto* b = reinterpret_cast<const double*>(x);
  __m256d p0 = _mm256_setzero_pd(), p1 = _mm256_setzero_pd();
  __m256d q0 = _mm256_setzero_pd(), q1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= cols; j += 4) {
    const __m256d a0 = _mm256_loadu_pd(a + 2 * j);
    const __m256d a1 = _mm256_loadu_pd(a + 2 * j + 4);
    const __m256d x0 = _mm256_loadu_pd(b + 2 * j);
    const __m256d x1 = _mm256_loadu_pd(b + 2 * j + 4);
    p0 = _mm256_fmadd_pd(a0, x0, p0);
    p1 = _mm256_fmadd_pd(a1, x1, p1);
    q0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(x0, 0b0101), q0);
    q1 = _mm256_fmadd_pd(a1, _mm256_permute_pd(x1, 0b0101), q1);
  }
  for (; j + 2 <= cols; j += 2) {
    const __m256d a0 = _mm256_loadu_pd(a + 2 * j);
    const __m256d x0 = _mm256_loadu_pd(b + 2 * j);
    p0 = _mm256_fmadd_pd(a0, x0, p0);
    q0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(x0, 0b0101), q0);
  }
  // p lanes: ar*xr, ai*xi ; q lanes: ar*xi, ai*xr
  const __m256d p = _mm256_add_pd(p0, p1);
  const __m256d q = _mm256_add_pd(q0, q1);
  alignas(32) double pl[4];
  _mm256_store_pd(pl, p);
  double re = (pl[0] + pl[2]) - (pl[1] + pl[3]);
  double im = hsum(q);
  for (; j < cols; ++j) {
    const double ar = a[2 * j], ai = a[2 * j + 1];
    const double xr = b[2 * j], xi = b[2 * j + 1];
    re += ar * xr - ai * xi;
    im += ar * xi + ai * xr;
  }
  out_re = re;
  out_im = im;
}

void cgemv_avx2(const Complex* a, std::size_t rows, std::size_t cols,
                const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    double re, im;
    row_dot(a + i * cols, x, cols, re, im);
    y[i] = Complex(re, im);
  }
}

Complex cbilinear_avx2(const Complex* a, std::size_t rows, std::size_t cols,
                       const Complex* l, const Complex* r) {
  double acc_re = 0.0, acc_im = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double yr, yi;
    row_dot(a + i * cols, r, cols, yr, yi);
    acc_re += l[i].real() * yr - l[i].imag() * yi;
    acc_im += l[i].real() * yi + l[i].imag() * yr;
  }
  return {acc_re, acc_im};
}

// (ur + i ui) * v for two interleaved complex lanes, without FMA so that the
// rounding matches the scalar reference.
inline __m256d cmul_bcast(__m256d ur, __m256d ui, __m256d v) {
  const __m256d a = _mm256_mul_pd(ur, v);
  const __m256d b = _mm256_mul_pd(ui, _mm256_permute_pd(v, 0b0101));
  return _mm256_addsub_pd(a, b);
}

inline void two_sum_into(__m256d& s, __m256d& c, __m256d x) {
  const __m256d t = _mm256_add_pd(s, x);
  const __m256d z = _mm256_sub_pd(t, s);
  const __m256d e = _mm256_add_pd(_mm256_sub_pd(s, _mm256_sub_pd(t, z)),
                                  _mm256_sub_pd(x, z));
  s = t;
  c = _mm256_add_pd(c, e);
}

void rank1_compensated_avx2(Complex* sum, Complex* comp, std::size_t rows,
                            std::size_t cols, const Complex* u,
                            const Complex* v) {
  auto* s = reinterpret_cast<double*>(sum);
  auto* c = reinterpret_cast<double*>(comp);
  const auto* vv = reinterpret_cast<const double*>(v);
  for (std::size_t i = 0; i < rows; ++i) {
    const double urs = u[i].real(), uis = u[i].imag();
    const __m256d ur = _mm256_set1_pd(urs);
    const __m256d ui = _mm256_set1_pd(uis);
    double* srow = s + 2 * i * cols;
    double* crow = c + 2 * i * cols;
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2) {
      const __m256d p = cmul_bcast(ur, ui, _mm256_loadu_pd(vv + 2 * j));
      __m256d sv = _mm256_loadu_pd(srow + 2 * j);
      __m256d cv = _mm256_loadu_pd(crow + 2 * j);
      two_sum_into(sv, cv, p);
      _mm256_storeu_pd(srow + 2 * j, sv);
      _mm256_storeu_pd(crow + 2 * j, cv);
    }
    for (; j < cols; ++j) {
      const double vr = vv[2 * j], vi = vv[2 * j + 1];
      const double pr = urs * vr - uis * vi;
      const double pi = urs * vi + uis * vr;
      for (int part = 0; part < 2; ++part) {
        double& sj = srow[2 * j + part];
        double& cj = crow[2 * j + part];
        const double x = part == 0 ? pr : pi;
        const double t = sj + x;
        const double z = t - sj;
        const double e = (sj - (t - z)) + (x - z);
        sj = t;
        cj = cj + e;
      }
    }
  }
}

void rank1_squares_avx2(Complex* sq, std::size_t rows, std::size_t cols,
                        const Complex* u, const Complex* v) {
  auto* q = reinterpret_cast<double*>(sq);
  const auto* vv = reinterpret_cast<const double*>(v);
  for (std::size_t i = 0; i < rows; ++i) {
    const double urs = u[i].real(), uis = u[i].imag();
    const __m256d ur = _mm256_set1_pd(urs);
    const __m256d ui = _mm256_set1_pd(uis);
    double* qrow = q + 2 * i * cols;
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2) {
      const __m256d p = cmul_bcast(ur, ui, _mm256_loadu_pd(vv + 2 * j));
      const __m256d qv = _mm256_loadu_pd(qrow + 2 * j);
      _mm256_storeu_pd(qrow + 2 * j, _mm256_add_pd(qv, _mm256_mul_pd(p, p)));
    }
    for (; j < cols; ++j) {
      const double vr = vv[2 * j], vi = vv[2 * j + 1];
      const double pr = urs * vr - uis * vi;
      const double pi = urs * vi + uis * vr;
      qrow[2 * j] = qrow[2 * j] + pr * pr;
      qrow[2 * j + 1] = qrow[2 * j + 1] + pi * pi;
    }
  }
}

double weighted_abs2_avx2(const Complex* a, std::size_t rows, std::size_t cols,
                          const double* wr, const double* wc) {
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto* row = reinterpret_cast<const double*>(a + i * cols);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const __m256d v0 = _mm256_loadu_pd(row + 2 * j);
      const __m256d v1 = _mm256_loadu_pd(row + 2 * j + 4);
      const __m256d w0 = _mm256_permute4x64_pd(
          _mm256_castpd128_pd256(_mm_loadu_pd(wc + j)), 0b01010000);
      const __m256d w1 = _mm256_permute4x64_pd(
          _mm256_castpd128_pd256(_mm_loadu_pd(wc + j + 2)), 0b01010000);
      acc0 = _mm256_fmadd_pd(_mm256_mul_pd(v0, v0), w0, acc0);
      acc1 = _mm256_fmadd_pd(_mm256_mul_pd(v1, v1), w1, acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; j < cols; ++j) {
      const double re = row[2 * j], im = row[2 * j + 1];
      acc += wc[j] * (re * re + im * im);
    }
    total += wr[i] * acc;
  }
  return total;
}

void planar_gemv_real_avx2(const double* a_re, const double* a_im,
                           std::size_t rows, std::size_t cols, const double* x,
                           Complex* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* rr = a_re + i * cols;
    const double* ri = a_im + i * cols;
    __m256d sr0 = _mm256_setzero_pd(), sr1 = _mm256_setzero_pd();
    __m256d si0 = _mm256_setzero_pd(), si1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= cols; j += 8) {
      const __m256d x0 = _mm256_loadu_pd(x + j);
      const __m256d x1 = _mm256_loadu_pd(x + j + 4);
      sr0 = _mm256_fmadd_pd(_mm256_loadu_pd(rr + j), x0, sr0);
      sr1 = _mm256_fmadd_pd(_mm256_loadu_pd(rr + j + 4), x1, sr1);
      si0 = _mm256_fmadd_pd(_mm256_loadu_pd(ri + j), x0, si0);
      si1 = _mm256_fmadd_pd(_mm256_loadu_pd(ri + j + 4), x1, si1);
    }
    double sr = hsum(_mm256_add_pd(sr0, sr1));
    double si = hsum(_mm256_add_pd(si0, si1));
    for (; j < cols; ++j) {
      sr += rr[j] * x[j];
      si += ri[j] * x[j];
    }
    y[i] = Complex(sr, si);
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{
      cgemv_avx2,         cbilinear_avx2,     rank1_compensated_avx2,
      rank1_squares_avx2, weighted_abs2_avx2, planar_gemv_real_avx2,
  };
  return &table;
}

}  // namespace rsi::simd::detail
