#include "rsi/fields/fields.hpp"

#include <cmath>
#include <string>

#include "rsi/geometry/quadrature.hpp"

namespace rsi {

double bump_profile(double y) {
  if (y >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - y * y));
}

namespace {

template <typename Amp>
void check_support(const Bump<Amp>& b, std::size_t index) {
  if (!(b.radius > 0.0)) {
    throw DomainError("bump " + std::to_string(index) +
                      ": radius must be positive");
  }
  if (!(b.center.norm() + b.radius < 1.0)) {
    throw DomainError("bump " + std::to_string(index) +
                      ": support |c| + r must stay inside the unit ball");
  }
}

// Radial rule for the profile. The profile is flat to all orders at y = 1,
// so plain Gauss-Legendre converges quickly.
const GaussRule& radial_rule() {
  static const GaussRule rule = gauss_legendre(160, 0.0, 1.0);
  return rule;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace

void StrengthField::validate() const {
  for (std::size_t m = 0; m < bumps.size(); ++m) {
    check_support(bumps[m], m);
    if (!(bumps[m].amplitude >= 0.0)) {
      throw DomainError("strength bump " + std::to_string(m) +
                        ": amplitude must be nonnegative");
    }
  }
  if (!(smoothness > 3.0)) {
    throw ConfigError("strength smoothness proxy s must exceed 3");
  }
}

bool StrengthField::is_zero() const {
  for (const auto& b : bumps)
    if (b.amplitude != 0.0) return false;
  return true;
}

double StrengthField::sup_norm() const {
  // Overlapping bumps are allowed, so sample the centers (where each bump
  // peaks) and take the largest value.
  double s = 0.0;
  for (const auto& b : bumps) s = std::max(s, eval_strength(*this, b.center));
  return s;
}

void MediumField::validate() const {
  for (std::size_t m = 0; m < bumps.size(); ++m) {
    check_support(bumps[m], m);
    if (bumps[m].amplitude.imag() < 0.0) {
      throw DomainError("medium bump " + std::to_string(m) +
                        ": Im q must be nonnegative");
    }
  }
}

bool MediumField::is_zero() const {
  for (const auto& b : bumps)
    if (b.amplitude != Complex{}) return false;
  return true;
}

double eval_strength(const StrengthField& field, const Vec3& x) {
  double v = 0.0;
  for (const auto& b : field.bumps) v += b(x);
  return v;
}

Complex eval_medium(const MediumField& field, const Vec3& x) {
  Complex v{};
  for (const auto& b : field.bumps) v += b(x);
  return v;
}

double bump_profile_transform(double kappa) {
  const GaussRule& rule = radial_rule();
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rule.nodes[i];
    acc += rule.weights[i] * bump_profile(r) * r * r * sinc(kappa * r);
  }
  return 4.0 * kPi * acc;
}

Complex fourier_oracle(const StrengthField& field, const Vec3& gamma) {
  const double g = gamma.norm();
  Complex acc{};
  for (const auto& b : field.bumps) {
    const double r3 = b.radius * b.radius * b.radius;
    const double phase = -gamma.dot(b.center);
    acc += b.amplitude * r3 * bump_profile_transform(g * b.radius) *
           Complex(std::cos(phase), std::sin(phase));
  }
  return acc / std::pow(2.0 * kPi, 3);
}

}  // namespace rsi
