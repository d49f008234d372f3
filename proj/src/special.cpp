#include "ghop/special.hpp"

#include <algorithm>
#include <vector>

namespace ghop::special {

namespace {

// Power series sum_m (-1)^m (x/2)^{2m} / (m! Gamma(m+nu+1)).
// Stable for small x; cancellation grows like e^x for large x.
double scaled_series(double nu, double x)
{
    const double q = 0.25 * x * x;
    double term = 1.0 / std::tgamma(nu + 1.0);
    double sum = term;
    for (int m = 1; m < 200; ++m) {
        term *= -q / (m * (m + nu));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

} // namespace

double bessel_j_int(int n, double x)
{
    if (n < 0) throw std::domain_error("bessel_j_int: order must be >= 0");
    if (x < 0.0) throw std::domain_error("bessel_j_int: argument must be >= 0");
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (x < 2.0) {
        return scaled_series(static_cast<double>(n), x) * std::pow(0.5 * x, n);
    }

    // Miller's algorithm: recurse downward from well above max(n, x).
    const int start = 2 * ((std::max(n, static_cast<int>(x)) + 40) / 2) + 20;
    double jp = 0.0, jc = 1e-30;
    double norm = 0.0, result = 0.0;
    for (int k = start; k >= 0; --k) {
        const double jm = (2.0 * (k + 1) / x) * jc - jp;
        jp = jc;
        jc = jm;
        if (k % 2 == 0) norm += (k == 0 ? 1.0 : 2.0) * jc;
        if (k == n) result = jc;
        // Rescale to avoid overflow.
        if (std::abs(jc) > 1e200) {
            jc *= 1e-200;
            jp *= 1e-200;
            norm *= 1e-200;
            result *= 1e-200;
        }
    }
    return result / norm;
}

double sph_bessel_j(int l, double x)
{
    if (l < 0) throw std::domain_error("sph_bessel_j: order must be >= 0");
    if (x < 0.0) throw std::domain_error("sph_bessel_j: argument must be >= 0");
    if (x == 0.0) return l == 0 ? 1.0 : 0.0;
    if (x < 0.5) {
        // j_l = sqrt(pi/(2x)) J_{l+1/2}; use the series of the scaled form.
        return scaled_series(l + 0.5, x) * std::sqrt(M_PI) / 2.0 *
               std::pow(0.5 * x, l);
    }
    if (l == 0) return std::sin(x) / x;

    const double j0 = std::sin(x) / x;
    if (l <= static_cast<int>(x)) {
        // Upward recurrence is stable while l < x.
        double jm = j0;
        double jc = std::sin(x) / (x * x) - std::cos(x) / x;
        for (int k = 1; k < l; ++k) {
            const double jn = (2.0 * k + 1.0) / x * jc - jm;
            jm = jc;
            jc = jn;
        }
        return jc;
    }

    // Downward recurrence normalized by j_0.
    const int start = l + static_cast<int>(std::sqrt(40.0 * l)) + 20;
    double jp = 0.0, jc = 1e-30, result = 0.0;
    for (int k = start; k >= 0; --k) {
        const double jm = (2.0 * k + 3.0) / x * jc - jp;
        jp = jc;
        jc = jm;
        if (k == l) result = jc;
        if (std::abs(jc) > 1e200) {
            jc *= 1e-200;
            jp *= 1e-200;
            result *= 1e-200;
        }
    }
    return result * (j0 / jc);
}

double bessel_j_scaled(int nu_twice, double x)
{
    if (x < 0.0) throw std::domain_error("bessel_j_scaled: argument must be >= 0");
    const double nu = 0.5 * nu_twice;
    if (nu_twice < -1)
        throw std::domain_error("bessel_j_scaled: order below -1/2 unsupported");
    if (x < 2.0) return scaled_series(nu, x);

    if (nu_twice == -1) {
        // J_{-1/2}(x)/(x/2)^{-1/2} = cos(x)/sqrt(pi)
        return std::cos(x) / std::sqrt(M_PI);
    }
    if (nu_twice % 2 == 0) {
        const int n = nu_twice / 2;
        return bessel_j_int(n, x) / std::pow(0.5 * x, n);
    }
    // Half-integer nu = l + 1/2: J_{l+1/2}(x) = sqrt(2x/pi) j_l(x).
    const int l = (nu_twice - 1) / 2;
    const double jnu = std::sqrt(2.0 * x / M_PI) * sph_bessel_j(l, x);
    return jnu / std::pow(0.5 * x, nu);
}

} // namespace ghop::special
