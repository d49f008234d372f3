#pragma once

#include <cmath>
#include <stdexcept>

namespace ghop {

/// Radius of the N-ball with unit volume.
inline double unit_ball_radius(int dim)
{
    if (dim < 2) throw std::domain_error("unit_ball_radius: dimension must be >= 2");
    // V_N(R) = pi^{N/2} R^N / Gamma(N/2 + 1) = 1
    return std::pow(std::tgamma(0.5 * dim + 1.0), 1.0 / dim) / std::sqrt(M_PI);
}

/// Surface area of the (N-1)-sphere of radius d embedded in R^N.
inline double sphere_surface_area(int dim, double d)
{
    if (dim < 2) throw std::domain_error("sphere_surface_area: dimension must be >= 2");
    if (d < 0.0) throw std::domain_error("sphere_surface_area: radius must be >= 0");
    return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim) *
           std::pow(d, dim - 1);
}

/// Jump geometry: dimension, jump length, and derived constants.
struct ProblemSpec {
    int dimension;
    double jump;
    double unit_radius;  // R_{0,N}
    double sphere_area;  // S(N,d)

    ProblemSpec(int dim, double d)
        : dimension(dim),
          jump(d),
          unit_radius(unit_ball_radius(dim)),
          sphere_area(sphere_surface_area(dim, d))
    {
        if (d < 0.0) throw std::domain_error("ProblemSpec: jump must be >= 0");
    }
};

} // namespace ghop
