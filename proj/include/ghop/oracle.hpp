#pragma once

// Independent numerical references: Monte-Carlo pair sampling, boundary-line
// quadrature for parametric 2D lawns, radial quadrature for 3-shells, and
// direct integration of the hyperspherical half-space integral. These never
// call the closed forms they are used to check.

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "ghop/problem.hpp"

namespace ghop::oracle {

struct McEstimate {
    double value;
    double standard_error;
    double box_efficiency;  // accepted start points / box draws
};

/// Axis-aligned bounding box for rejection sampling of start points.
struct BoundingBox {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// Monte-Carlo estimate of the pair probability: uniform start point in the
/// lawn (rejection from the box), uniform jump direction, hit test.
/// Deterministic given the seed; internally chunked so the result does not
/// depend on thread count.
McEstimate mc_pair_probability(const std::function<bool(const std::vector<double>&)>& lawn,
                               const BoundingBox& box, const ProblemSpec& spec,
                               long long samples, unsigned long long seed);

/// Closed 2D boundary in polar form: radius and derivative over [0, 2pi).
struct ParametricCurve2D {
    std::function<double(double)> radius;
    std::function<double(double)> radius_deriv;

    /// Checks positivity on a sample grid and 2pi-periodicity at the seam.
    void validate() const;
};

/// Disk perturbed by eps*cos(n theta) with the area-preserving base radius
/// R_eps = sqrt(R_{0,2}^2 - eps^2/2).
struct PerturbedDiskSpec {
    int mode;
    double amplitude;
    double area_radius;

    PerturbedDiskSpec(int n, double eps);
    ParametricCurve2D curve() const;
};

/// Multi-mode variant: eps_i*cos(n_i theta) summed, base radius corrected so
/// the enclosed area is exactly 1 through second order.
ParametricCurve2D multi_mode_disk(const std::vector<std::pair<int, double>>& modes);

/// Double line integral -\iint Phi(|r1 - r2|) r1' . r2' over the curve,
/// with the integration split at the chord-kink angles where |r1 - r2| = d.
double perturbed_disk_probability(const ParametricCurve2D& curve,
                                  const ProblemSpec& spec);

/// Unit-volume spherical shell in 3D; the outer radius is derived from the
/// inner one.
struct ShellSpec {
    double inner_radius;
    double outer_radius;

    explicit ShellSpec(double rho);
};

/// Pair probability of the 3-shell by 1D radial quadrature over piecewise
/// closed-form spherical-cap area fractions.
double shell_probability(const ShellSpec& shell, const ProblemSpec& spec);

/// Maximizes shell_probability over the inner radius by golden-section
/// search; returns (rho*, p*).
std::pair<double, double> optimal_shell_radius(double d);

/// Numeric evaluation of the half-space stability coefficient from the
/// hyperspherical double integral, N in {2,3,4}. Oscillatory radial tail
/// summed panel-by-panel between zeros of the angular factor and
/// accelerated with Wynn's epsilon algorithm.
double halfspace_stability_numeric(double k, const ProblemSpec& spec);

} // namespace ghop::oracle
