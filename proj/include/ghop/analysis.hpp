#pragma once

// Read-only post-processing of spin configurations: boundary extraction,
// radial histograms with an isotropy verdict, angular mode spectra of 2D
// boundaries, connected components, and discretization-error tables.

#include <array>
#include <vector>

#include "ghop/lattice.hpp"

namespace ghop::analysis {

/// Occupied cells with at least one empty face neighbor.
std::vector<long long> boundary_cells(const lattice::SpinConfiguration& config);

struct BoundaryReport {
    std::vector<long long> boundary;
    std::array<double, 3> centroid;  // of all occupied cells
    std::vector<double> radii;       // boundary-cell radii from the centroid
    std::vector<double> bin_edges;   // bins + 1 entries
    std::vector<long long> counts;   // histogram over `radii`
};

/// Histogram of boundary radii about the occupied centroid; bins >= 10,
/// configuration must be non-empty.
BoundaryReport radial_histogram(const lattice::SpinConfiguration& config, int bins);

/// Fraction of boundary radii outside every [r - halfwidth, r + halfwidth]
/// window around the expected radii.
double mass_outside_windows(const BoundaryReport& report,
                            const std::vector<double>& expected_radii,
                            double halfwidth);

/// Isotropy verdict: boundary mass outside [expected +- h] below 5%.
bool is_isotropic(const BoundaryReport& report,
                  const std::vector<double>& expected_radii, double cell_size);

struct CogSpectrum {
    double mean_radius;
    std::vector<double> amplitudes;  // index = mode n, up to bins/2
    int dominant_mode;               // argmax over n >= 2
    double dominant_amplitude;
};

/// Angular mode decomposition of a 2D boundary that is star-shaped about
/// the centroid: radii averaged over 512 angular bins, then a DFT.
/// Throws if a bin is empty or holds widely split radii (hollow or
/// disconnected shapes) -- use connected_components on those.
CogSpectrum cog_spectrum(const lattice::SpinConfiguration& config);

/// Face-adjacency components of the occupied set, largest first.
std::vector<std::vector<long long>> connected_components(
    const lattice::SpinConfiguration& config);

struct DiscretizationRow {
    long long cells;  // M
    double cell_size;
    double probability;         // discrete functional on the rasterized shape
    double reference;           // continuum value
    double relative_deviation;  // |probability - reference| / reference
};

/// Rasterizes ball/shell shapes at each resolution and tabulates the
/// discrete-vs-continuum deviation.
std::vector<DiscretizationRow> discretization_report(
    const lattice::ShapeSpec& shape, const ProblemSpec& spec,
    const std::vector<long long>& cell_counts);

} // namespace ghop::analysis
