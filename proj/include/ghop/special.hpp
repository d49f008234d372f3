#pragma once

// Bessel functions of integer and half-integer order, plus the small set of
// gamma-function helpers used by the stability formulas. Self-contained:
// series at small argument, normalized downward recurrence elsewhere.

#include <cmath>
#include <stdexcept>

namespace ghop::special {

/// J_n(x) for integer n >= 0 by Miller's downward recurrence,
/// normalized with J_0 + 2*sum J_{2m} = 1. Relative accuracy ~1e-13
/// for x up to ~1e3.
double bessel_j_int(int n, double x);

/// Spherical Bessel j_l(x), l >= 0, by downward recurrence normalized
/// against j_0 = sin(x)/x.
double sph_bessel_j(int l, double x);

/// J_nu(x)/(x/2)^nu with nu = nu_twice/2 (nu_twice may be negative odd,
/// e.g. -1 for nu = -1/2). Entire in x; equals 1/Gamma(nu+1) at x = 0.
double bessel_j_scaled(int nu_twice, double x);

} // namespace ghop::special
