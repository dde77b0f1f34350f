#include "rsi/simd/kernels.hpp"

namespace rsi::simd::detail {
namespace {

// Reference kernels. Complex arithmetic is spelled out so the operation order
// matches the SIMD variants term for term.

void cgemv_scalar(const Complex* a, std::size_t rows, std::size_t cols,
                  const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const Complex* row = a + i * cols;
    double rr = 0.0, ii = 0.0, ri = 0.0, ir = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double ar = row[j].real(), ai = row[j].imag();
      const double xr = x[j].real(), xi = x[j].imag();
      rr += ar * xr;
      ii += ai * xi;
      ri += ar * xi;
      ir += ai * xr;
    }
    y[i] = Complex(rr - ii, ri + ir);
  }
}

Complex cbilinear_scalar(const Complex* a, std::size_t rows, std::size_t cols,
                         const Complex* l, const Complex* r) {
  double acc_re = 0.0, acc_im = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const Complex* row = a + i * cols;
    double rr = 0.0, ii = 0.0, ri = 0.0, ir = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double ar = row[j].real(), ai = row[j].imag();
      const double xr = r[j].real(), xi = r[j].imag();
      rr += ar * xr;
      ii += ai * xi;
      ri += ar * xi;
      ir += ai * xr;
    }
    const double yr = rr - ii, yi = ri + ir;
    acc_re += l[i].real() * yr - l[i].imag() * yi;
    acc_im += l[i].real() * yi + l[i].imag() * yr;
  }
  return {acc_re, acc_im};
}

inline void two_sum_into(double& s, double& c, double x) {
  const double t = s + x;
  const double z = t - s;
  const double e = (s - (t - z)) + (x - z);
  s = t;
  c = c + e;
}

void rank1_compensated_scalar(Complex* sum, Complex* comp, std::size_t rows,
                              std::size_t cols, const Complex* u,
                              const Complex* v) {
  auto* s = reinterpret_cast<double*>(sum);
  auto* c = reinterpret_cast<double*>(comp);
  for (std::size_t i = 0; i < rows; ++i) {
    const double ur = u[i].real(), ui = u[i].imag();
    double* srow = s + 2 * i * cols;
    double* crow = c + 2 * i * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      const double vr = v[j].real(), vi = v[j].imag();
      const double pr = ur * vr - ui * vi;
      const double pi = ur * vi + ui * vr;
      two_sum_into(srow[2 * j], crow[2 * j], pr);
      two_sum_into(srow[2 * j + 1], crow[2 * j + 1], pi);
    }
  }
}

void rank1_squares_scalar(Complex* sq, std::size_t rows, std::size_t cols,
                          const Complex* u, const Complex* v) {
  auto* q = reinterpret_cast<double*>(sq);
  for (std::size_t i = 0; i < rows; ++i) {
    const double ur = u[i].real(), ui = u[i].imag();
    double* qrow = q + 2 * i * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      const double vr = v[j].real(), vi = v[j].imag();
      const double pr = ur * vr - ui * vi;
      const double pi = ur * vi + ui * vr;
      qrow[2 * j] = qrow[2 * j] + pr * pr;
      qrow[2 * j + 1] = qrow[2 * j + 1] + pi * pi;
    }
  }
}

double weighted_abs2_scalar(const Complex* a, std::size_t rows,
                            std::size_t cols, const double* wr,
                            const double* wc) {
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const Complex* row = a + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double re = row[j].real(), im = row[j].imag();
      acc += wc[j] * (re * re + im * im);
    }
    total += wr[i] * acc;
  }
  return total;
}

void planar_gemv_real_scalar(const double* a_re, const double* a_im,
                             std::size_t rows, std::size_t cols,
                             const double* x, Complex* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* rr = a_re + i * cols;
    const double* ri = a_im + i * cols;
    double sr = 0.0, si = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      sr += rr[j] * x[j];
      si += ri[j] * x[j];
    }
    y[i] = Complex(sr, si);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      cgemv_scalar,          cbilinear_scalar,     rank1_compensated_scalar,
      rank1_squares_scalar,  weighted_abs2_scalar, planar_gemv_real_scalar,
  };
  return table;
}

}  // namespace rsi::simd::detail
