#pragma once

// Closed-form grasshopper quantities: isotropic N-ball probabilities, the
// radial Green's potential, half-space plane-wave stability coefficients,
// and disk-perturbation stability coefficients with their zeros.

#include <utility>
#include <vector>

#include "ghop/problem.hpp"

namespace ghop::analytic {

/// Exact probability for the unit-area disk, 0 <= d <= 2*R_{0,2}.
double disk_probability(const ProblemSpec& spec);

/// Exact probability for the unit-volume 3-ball, 0 <= d <= R_{0,3}.
double ball_probability(const ProblemSpec& spec);

/// Radially symmetric solution of Laplacian(Phi) = delta(r-d)/S(N,d),
/// vanishing at infinity for N > 2.
double greens_potential(double r, const ProblemSpec& spec);

/// Plane-wave stability coefficient delta p_k(d) of the flat half-space
/// boundary in N dimensions. Zero at k = 0; nonpositive for N >= 3.
double halfspace_stability(double k, const ProblemSpec& spec);

/// Large-N collapse limit (1/(2 sqrt(2 pi)))(exp(-x^2/2) - 1).
double halfspace_limit_curve(double x);

/// The collapsed half-space coefficient N^{-1/2} d delta p_k at kd = sqrt(N) x.
/// Independent of d; tends to halfspace_limit_curve(x) as N grows.
double halfspace_collapsed(int dim, double x);

/// Angle phi_0 between two points on the unit-area circle separated by
/// chord length d.
double disk_phi0(const ProblemSpec& spec);

/// Stability coefficient delta p_n(d) of the disk boundary under an n-fold
/// cosine perturbation, n >= 2, 0 < d < 2*R_{0,2}.
double disk_stability(int n, const ProblemSpec& spec);

/// Smallest jump d at which delta p_n first crosses zero.
double disk_first_zero(int n);

/// Modes n in [2, n_max] ranked by descending delta p_n(d); ties broken by
/// smaller n.
std::vector<std::pair<int, double>> most_unstable_modes(double d, int n_max);

/// Sampled (abscissa, coefficient) stability series.
struct StabilityCurve {
    enum class Kind { half_space, disk };
    enum class Provenance { closed_form, numeric_oracle };
    Kind kind;
    int dimension = 0;  // half-space only
    double mode = 0.0;  // wavenumber k, or disk mode n
    std::vector<std::pair<double, double>> samples;
    Provenance provenance = Provenance::closed_form;

    void validate() const;  // strictly increasing abscissa, finite entries
};

/// Half-space curve sampled on a uniform kd grid at fixed d.
StabilityCurve halfspace_curve(int dim, double d, double kd_max, int points);

/// Disk curve delta p_n over a uniform d grid in (0, d_max].
StabilityCurve disk_curve(int n, double d_max, int points);

} // namespace ghop::analytic
