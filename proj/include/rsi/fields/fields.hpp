#pragma once

#include <vector>

#include "rsi/common.hpp"

namespace rsi {

/// Smooth compactly supported profile exp(1 - 1/(1 - |y|^2)) on |y| < 1,
/// normalized so that bump_profile(0) = 1.
double bump_profile(double y_norm);

template <typename Amplitude>
struct Bump {
  Vec3 center = Vec3::Zero();
  double radius = 0.5;
  Amplitude amplitude{};

  Amplitude operator()(const Vec3& x) const {
    const double y = (x - center).norm() / radius;
    if (y >= 1.0) return Amplitude{};
    return amplitude * bump_profile(y);
  }
};

/// Source strength mu >= 0 as a sum of bumps.
struct StrengthField {
  std::vector<Bump<double>> bumps;
  /// Smoothness proxy used only by parameter selection and fitting.
  double smoothness = 6.0;

  /// Throws DomainError if a support ball leaves B1 or an amplitude is
  /// negative, ConfigError if smoothness <= 3.
  void validate() const;
  bool is_zero() const;
  double sup_norm() const;
};

/// Medium perturbation q with Im q >= 0, also a sum of bumps.
struct MediumField {
  std::vector<Bump<Complex>> bumps;

  void validate() const;
  bool is_zero() const;
};

double eval_strength(const StrengthField& field, const Vec3& x);
Complex eval_medium(const MediumField& field, const Vec3& x);

/// Fourier transform of the unit-radius profile, int B(y) e^{-i kappa . y} dy,
/// as a function of |kappa| (radial quadrature).
double bump_profile_transform(double kappa);

/// mu_hat(gamma) = (2 pi)^{-3} int e^{-i gamma . x} mu(x) dx, accurate to
/// about 1e-12 absolute for amplitudes of order one.
Complex fourier_oracle(const StrengthField& field, const Vec3& gamma);

}  // namespace rsi
