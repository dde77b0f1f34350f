#include <atomic>
#include <cstdlib>
#include <string>

#include "rsi/simd/kernels.hpp"

namespace rsi::simd {
namespace detail {

#ifndef RSI_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  const bool avx2 = backend_available(Backend::kAvx2);
  if (const char* env = std::getenv("RSI_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return Backend::kScalar;
    if (choice == "avx2" && avx2) return Backend::kAvx2;
  }
  return avx2 ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<const detail::KernelTable*>& table_slot() {
  static std::atomic<const detail::KernelTable*> slot{
      initial_backend() == Backend::kAvx2 ? detail::avx2_table()
                                          : &detail::scalar_table()};
  return slot;
}

const detail::KernelTable& table() {
  return *table_slot().load(std::memory_order_relaxed);
}

}  // namespace

bool backend_available(Backend backend) {
  if (backend == Backend::kScalar) return true;
  return detail::avx2_table() != nullptr && cpu_has_avx2();
}

Backend active_backend() {
  return table_slot().load() == &detail::scalar_table() ? Backend::kScalar
                                                        : Backend::kAvx2;
}

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw ConfigError("SIMD backend '" + std::string(backend_name(backend)) +
                      "' is not available on this CPU/build");
  }
  table_slot().store(backend == Backend::kAvx2 ? detail::avx2_table()
                                               : &detail::scalar_table());
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

void cgemv(const Complex* a, std::size_t rows, std::size_t cols,
           const Complex* x, Complex* y) {
  table().cgemv(a, rows, cols, x, y);
}

Complex cbilinear(const Complex* a, std::size_t rows, std::size_t cols,
                  const Complex* l, const Complex* r) {
  return table().cbilinear(a, rows, cols, l, r);
}

void rank1_compensated(Complex* sum, Complex* comp, std::size_t rows,
                       std::size_t cols, const Complex* u, const Complex* v) {
  table().rank1_compensated(sum, comp, rows, cols, u, v);
}

void rank1_squares(Complex* sq, std::size_t rows, std::size_t cols,
                   const Complex* u, const Complex* v) {
  table().rank1_squares(sq, rows, cols, u, v);
}

double weighted_abs2(const Complex* a, std::size_t rows, std::size_t cols,
                     const double* wr, const double* wc) {
  return table().weighted_abs2(a, rows, cols, wr, wc);
}

void planar_gemv_real(const double* a_re, const double* a_im, std::size_t rows,
                      std::size_t cols, const double* x, Complex* y) {
  table().planar_gemv_real(a_re, a_im, rows, cols, x, y);
}

}  // namespace rsi::simd
