#pragma once

#include <span>
#include <vector>

#include "rsi/common.hpp"
#include "rsi/geometry/quadrature.hpp"

namespace rsi {

/// Spherical Hankel functions of the first kind h_0(z) .. h_L(z) for real
/// z > 0, by upward recurrence (stable: |h_n| grows with n).
std::vector<Complex> spherical_hankel1(int L, double z);

/// Orthonormal spherical harmonics Y_n^m(dir) for 0 <= n <= L, -n <= m <= n,
/// stored at index n*n + n + m. `dir` need not be normalized.
std::vector<Complex> spherical_harmonics(int L, const Vec3& dir);

/// Outgoing field on |x| = R from its Dirichlet trace on the unit sphere:
/// the trace is projected onto Y_n^m (n <= L) with the unit-sphere rule, mode
/// (n, m) is scaled by h_n(kR)/h_n(k), and the series is summed at the rule's
/// directions scaled to radius R.
///
/// Throws DomainError unless R > 1, L >= 1, k > 0, the rule has radius 1 and
/// the value count matches.
std::vector<Complex> propagate_exterior(std::span<const Complex> values,
                                        const SphereQuadrature& unit_rule,
                                        double R, double k, int L);

}  // namespace rsi
