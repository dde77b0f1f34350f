#pragma once

#include "rsi/common.hpp"

namespace rsi {

/// Outgoing fundamental solution of Delta + k^2:
///   G(x, y) = -exp(i k |x - y|) / (4 pi |x - y|).
/// Throws SingularityError when x == y (use self_cell_integral instead).
Complex green(double k, const Vec3& x, const Vec3& y);

/// Gradient of G with respect to x.
CVec3 green_gradient(double k, const Vec3& x, const Vec3& y);

/// nu . grad_x G(x, y) = G (i k - 1/r) (nu . (x - y)) / r.
Complex green_normal_derivative(double k, const Vec3& x, const Vec3& y,
                                const Vec3& nu);

/// Integral of G(x, .) over the ball of the given volume centred at x:
///   -int_0^a r e^{i k r} dr,  a = (3 volume / 4 pi)^{1/3}.
Complex self_cell_integral(double k, double volume);

}  // namespace rsi
