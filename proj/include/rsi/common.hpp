#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace rsi {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing parameter (refinement level, spacing, config key).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Green's function requested at coincident points.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Dense factorization of the Lippmann-Schwinger system failed.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double k, double q_sup)
      : Error(what), k_(k), q_sup_(q_sup) {}
  double k() const { return k_; }
  double q_sup() const { return q_sup_; }

 private:
  double k_;
  double q_sup_;
};

/// Real probe requested at |gamma| >= 2k.
class OutOfBandError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Unconjugated bilinear product a . b for complex 3-vectors.
inline Complex dotu(const CVec3& a, const CVec3& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

}  // namespace rsi
