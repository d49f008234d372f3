#include "ghop/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ghop/special.hpp"

namespace ghop::analytic {

double disk_probability(const ProblemSpec& spec)
{
    if (spec.dimension != 2)
        throw std::domain_error("disk_probability: requires N = 2");
    const double r0 = spec.unit_radius;
    const double u = spec.jump / (2.0 * r0);
    if (u < 0.0 || u > 1.0)
        throw std::domain_error("disk_probability: d must lie in [0, 2*R_{0,2}]");
    return 1.0 - 2.0 / M_PI * (u * std::sqrt(1.0 - u * u) + std::asin(u));
}

double ball_probability(const ProblemSpec& spec)
{
    if (spec.dimension != 3)
        throw std::domain_error("ball_probability: requires N = 3");
    const double u = spec.jump / spec.unit_radius;
    if (u < 0.0 || u > 1.0)
        throw std::domain_error("ball_probability: d must lie in [0, R_{0,3}]");
    return 1.0 - 0.75 * u + u * u * u / 16.0;
}

double greens_potential(double r, const ProblemSpec& spec)
{
    if (r < 0.0) throw std::domain_error("greens_potential: r must be >= 0");
    const int dim = spec.dimension;
    const double d = spec.jump;
    if (dim == 2) {
        return r > d ? std::log(r / d) / (2.0 * M_PI) : 0.0;
    }
    const double c = d / ((dim - 2) * spec.sphere_area);
    if (r <= d) return -c;
    return c * (-std::pow(d / r, dim - 2));
}

double halfspace_stability(double k, const ProblemSpec& spec)
{
    if (k < 0.0) throw std::domain_error("halfspace_stability: k must be >= 0");
    const int dim = spec.dimension;
    const double d = spec.jump;
    if (d <= 0.0) throw std::domain_error("halfspace_stability: d must be > 0");
    const double x = k * d;
    const double pref = std::tgamma(0.5 * dim) / (2.0 * std::sqrt(M_PI) * d);
    // J_{(N-3)/2}(x)/(x/2)^{(N-3)/2} equals 1/Gamma((N-1)/2) at x = 0.
    return pref * (special::bessel_j_scaled(dim - 3, x) -
                   1.0 / std::tgamma(0.5 * (dim - 1)));
}

double halfspace_limit_curve(double x)
{
    return (std::exp(-0.5 * x * x) - 1.0) / (2.0 * std::sqrt(2.0 * M_PI));
}

double halfspace_collapsed(int dim, double x)
{
    const double d = 1.0;
    const ProblemSpec spec(dim, d);
    const double k = std::sqrt(static_cast<double>(dim)) * x / d;
    return d * halfspace_stability(k, spec) / std::sqrt(static_cast<double>(dim));
}

double disk_phi0(const ProblemSpec& spec)
{
    if (spec.dimension != 2) throw std::domain_error("disk_phi0: requires N = 2");
    const double r0 = spec.unit_radius;
    const double d = spec.jump;
    if (d <= 0.0 || d > 2.0 * r0)
        throw std::domain_error("disk_phi0: d must lie in (0, 2*R_{0,2}]");
    return std::acos(1.0 - d * d / (2.0 * r0 * r0));
}

double disk_stability(int n, const ProblemSpec& spec)
{
    if (n < 2) throw std::domain_error("disk_stability: mode n must be >= 2");
    const double d = spec.jump;
    const double r0 = spec.unit_radius;
    if (d <= 0.0 || d >= 2.0 * r0)
        throw std::domain_error("disk_stability: d must lie in (0, 2*R_{0,2})");
    const double phi0 = disk_phi0(spec);
    return -(std::cos(phi0) - std::cos(n * phi0)) / std::sin(phi0);
}

double disk_first_zero(int n)
{
    if (n < 2) throw std::domain_error("disk_first_zero: mode n must be >= 2");
    const double phi0 = 2.0 * M_PI / (n + 1);
    return std::sqrt(2.0 / M_PI * (1.0 - std::cos(phi0)));
}

std::vector<std::pair<int, double>> most_unstable_modes(double d, int n_max)
{
    if (n_max < 2) throw std::domain_error("most_unstable_modes: n_max must be >= 2");
    const ProblemSpec spec(2, d);
    std::vector<std::pair<int, double>> modes;
    modes.reserve(n_max - 1);
    for (int n = 2; n <= n_max; ++n) modes.emplace_back(n, disk_stability(n, spec));
    std::stable_sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return modes;
}

void StabilityCurve::validate() const
{
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].first) || !std::isfinite(samples[i].second))
            throw std::runtime_error("StabilityCurve: non-finite sample");
        if (i > 0 && samples[i].first <= samples[i - 1].first)
            throw std::runtime_error("StabilityCurve: abscissa not increasing");
    }
}

StabilityCurve halfspace_curve(int dim, double d, double kd_max, int points)
{
    if (points < 2) throw std::domain_error("halfspace_curve: need >= 2 points");
    const ProblemSpec spec(dim, d);
    StabilityCurve curve;
    curve.kind = StabilityCurve::Kind::half_space;
    curve.dimension = dim;
    for (int i = 0; i < points; ++i) {
        const double kd = kd_max * (i + 1) / points;
        curve.samples.emplace_back(kd, halfspace_stability(kd / d, spec));
    }
    curve.validate();
    return curve;
}

StabilityCurve disk_curve(int n, double d_max, int points)
{
    if (points < 2) throw std::domain_error("disk_curve: need >= 2 points");
    StabilityCurve curve;
    curve.kind = StabilityCurve::Kind::disk;
    curve.mode = n;
    for (int i = 0; i < points; ++i) {
        const double d = d_max * (i + 1) / points;
        curve.samples.emplace_back(d, disk_stability(n, ProblemSpec(2, d)));
    }
    curve.validate();
    return curve;
}

} // namespace ghop::analytic
