#pragma once

// Data-parallel inner loops shared by the forward, correlation and inversion
// modules. Every kernel has a portable scalar reference implementation and an
// AVX2/FMA variant; the variant is chosen once at startup from CPUID and can be
// overridden with RSI_SIMD=scalar|avx2 or set_backend().
//
// Complex arrays are interleaved (re, im) and matrices are row-major with the
// leading dimension equal to the column count.
//
// Elementwise kernels (rank1_compensated, rank1_squares) are bitwise identical
// across backends. Reductions (cgemv, cbilinear, weighted_abs2,
// planar_gemv_real) agree to rounding only, because lane order changes the
// summation order.

#include <cstddef>
#include <string_view>

#include "rsi/common.hpp"

namespace rsi::simd {

enum class Backend { kScalar, kAvx2 };

Backend active_backend();
bool backend_available(Backend backend);
/// Throws ConfigError when the CPU (or the build) lacks the backend.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

/// y = A x.
void cgemv(const Complex* a, std::size_t rows, std::size_t cols,
           const Complex* x, Complex* y);

/// Unconjugated bilinear form l^T A r for a rows x cols matrix.
Complex cbilinear(const Complex* a, std::size_t rows, std::size_t cols,
                  const Complex* l, const Complex* r);

/// sum[i,j] += u_i v_j, carried in (sum, comp) with an error-free TwoSum so the
/// rounding error of every addition is retained in comp.
void rank1_compensated(Complex* sum, Complex* comp, std::size_t rows,
                       std::size_t cols, const Complex* u, const Complex* v);

/// sq[i,j] += ((Re u_i v_j)^2, (Im u_i v_j)^2), packed as a complex number.
void rank1_squares(Complex* sq, std::size_t rows, std::size_t cols,
                   const Complex* u, const Complex* v);

/// sum_ij wr_i wc_j |A_ij|^2.
double weighted_abs2(const Complex* a, std::size_t rows, std::size_t cols,
                     const double* wr, const double* wc);

/// y = (A_re + i A_im) x for a real vector x and a split-storage matrix.
void planar_gemv_real(const double* a_re, const double* a_im, std::size_t rows,
                      std::size_t cols, const double* x, Complex* y);

namespace detail {

struct KernelTable {
  void (*cgemv)(const Complex*, std::size_t, std::size_t, const Complex*,
                Complex*);
  Complex (*cbilinear)(const Complex*, std::size_t, std::size_t,
                       const Complex*, const Complex*);
  void (*rank1_compensated)(Complex*, Complex*, std::size_t, std::size_t,
                            const Complex*, const Complex*);
  void (*rank1_squares)(Complex*, std::size_t, std::size_t, const Complex*,
                        const Complex*);
  double (*weighted_abs2)(const Complex*, std::size_t, std::size_t,
                          const double*, const double*);
  void (*planar_gemv_real)(const double*, const double*, std::size_t,
                           std::size_t, const double*, Complex*);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in

}  // namespace detail
}  // namespace rsi::simd
