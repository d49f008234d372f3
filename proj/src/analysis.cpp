#include "ghop/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "ghop/analytic.hpp"
#include "ghop/oracle.hpp"

namespace ghop::analysis {

using lattice::SpinConfiguration;

std::vector<long long> boundary_cells(const SpinConfiguration& config)
{
    const auto& lat = config.lattice;
    std::vector<long long> result;
    for (long long idx : config.occupied) {
        const auto c = lat.unpack(idx);
        bool boundary = false;
        for (int a = 0; a < lat.dimension && !boundary; ++a) {
            for (int s : {-1, 1}) {
                auto n = c;
                n[a] += s;
                if (!config.grid[lat.pack(n[0], n[1], n[2])]) {
                    boundary = true;
                    break;
                }
            }
        }
        if (boundary) result.push_back(idx);
    }
    return result;
}

namespace {

std::array<double, 3> occupied_centroid(const SpinConfiguration& config)
{
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (long long idx : config.occupied) {
        const auto p = config.lattice.center(idx);
        for (int a = 0; a < 3; ++a) c[a] += p[a];
    }
    for (int a = 0; a < 3; ++a) c[a] /= config.occupied_count();
    return c;
}

} // namespace

BoundaryReport radial_histogram(const SpinConfiguration& config, int bins)
{
    if (config.occupied.empty())
        throw std::invalid_argument("radial_histogram: empty configuration");
    if (bins < 10) throw std::invalid_argument("radial_histogram: need >= 10 bins");

    BoundaryReport report;
    report.boundary = boundary_cells(config);
    report.centroid = occupied_centroid(config);
    double rmax = 0.0;
    for (long long idx : report.boundary) {
        const auto p = config.lattice.center(idx);
        double r2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double d = p[a] - report.centroid[a];
            r2 += d * d;
        }
        report.radii.push_back(std::sqrt(r2));
        rmax = std::max(rmax, report.radii.back());
    }
    const double top = rmax + config.lattice.cell_size;
    report.bin_edges.resize(bins + 1);
    report.counts.assign(bins, 0);
    for (int b = 0; b <= bins; ++b) report.bin_edges[b] = top * b / bins;
    for (double r : report.radii) {
        int b = static_cast<int>(r / top * bins);
        b = std::min(b, bins - 1);
        ++report.counts[b];
    }
    return report;
}

double mass_outside_windows(const BoundaryReport& report,
                            const std::vector<double>& expected_radii,
                            double halfwidth)
{
    if (report.radii.empty()) return 0.0;
    long long outside = 0;
    for (double r : report.radii) {
        bool in = false;
        for (double e : expected_radii)
            if (std::abs(r - e) <= halfwidth) {
                in = true;
                break;
            }
        if (!in) ++outside;
    }
    return static_cast<double>(outside) / report.radii.size();
}

bool is_isotropic(const BoundaryReport& report,
                  const std::vector<double>& expected_radii, double cell_size)
{
    return mass_outside_windows(report, expected_radii, cell_size) < 0.05;
}

CogSpectrum cog_spectrum(const SpinConfiguration& config)
{
    if (config.lattice.dimension != 2)
        throw std::invalid_argument("cog_spectrum: 2D configurations only");
    if (config.occupied.empty())
        throw std::invalid_argument("cog_spectrum: empty configuration");

    constexpr int bins = 512;
    const auto boundary = boundary_cells(config);
    const auto centroid = occupied_centroid(config);
    const double h = config.lattice.cell_size;

    std::vector<double> sum(bins, 0.0), lo(bins, 1e300), hi(bins, -1e300);
    std::vector<long long> count(bins, 0);
    for (long long idx : boundary) {
        const auto p = config.lattice.center(idx);
        const double x = p[0] - centroid[0], y = p[1] - centroid[1];
        const double r = std::hypot(x, y);
        // A cell subtends a finite angular interval; credit its radius to
        // every bin that interval overlaps, so a boundary coarser than the
        // bin grid leaves no spurious gaps.
        const double theta = std::atan2(y, x);
        double tmin = theta, tmax = theta;
        for (int sx : {-1, 1}) {
            for (int sy : {-1, 1}) {
                double tc = std::atan2(y + 0.5 * sy * h, x + 0.5 * sx * h);
                while (tc - theta > M_PI) tc -= 2.0 * M_PI;
                while (theta - tc > M_PI) tc += 2.0 * M_PI;
                tmin = std::min(tmin, tc);
                tmax = std::max(tmax, tc);
            }
        }
        const double w = 2.0 * M_PI / bins;
        const int b0 = static_cast<int>(std::floor(tmin / w));
        const int b1 = static_cast<int>(std::floor(tmax / w));
        for (int b = b0; b <= b1; ++b) {
            const int bb = ((b % bins) + bins) % bins;
            sum[bb] += r;
            lo[bb] = std::min(lo[bb], r);
            hi[bb] = std::max(hi[bb], r);
            ++count[bb];
        }
    }

    CogSpectrum spectrum;
    std::vector<double> radius(bins);
    double mean = 0.0;
    for (int b = 0; b < bins; ++b) {
        if (count[b] == 0)
            throw std::runtime_error(
                "cog_spectrum: empty angular bin; boundary is not star-shaped "
                "about the centroid (try connected_components)");
        radius[b] = sum[b] / count[b];
        mean += radius[b];
    }
    mean /= bins;
    for (int b = 0; b < bins; ++b) {
        if (hi[b] - lo[b] > std::max(5.0 * h, 0.15 * mean))
            throw std::runtime_error(
                "cog_spectrum: multimodal radii in an angular bin; boundary is "
                "not star-shaped about the centroid (try connected_components)");
    }

    spectrum.mean_radius = mean;
    spectrum.amplitudes.resize(bins / 2);
    spectrum.amplitudes[0] = mean;
    for (int n = 1; n < bins / 2; ++n) {
        std::complex<double> c(0.0, 0.0);
        for (int b = 0; b < bins; ++b)
            c += radius[b] *
                 std::exp(std::complex<double>(0.0, -2.0 * M_PI * n * b / bins));
        spectrum.amplitudes[n] = 2.0 * std::abs(c) / bins;
    }
    spectrum.dominant_mode = 2;
    for (int n = 3; n < bins / 2; ++n)
        if (spectrum.amplitudes[n] > spectrum.amplitudes[spectrum.dominant_mode])
            spectrum.dominant_mode = n;
    spectrum.dominant_amplitude = spectrum.amplitudes[spectrum.dominant_mode];
    return spectrum;
}

std::vector<std::vector<long long>> connected_components(
    const SpinConfiguration& config)
{
    const auto& lat = config.lattice;
    std::vector<std::uint8_t> seen(lat.cell_count(), 0);
    std::vector<std::vector<long long>> components;
    std::vector<long long> stack;
    for (long long start : config.occupied) {
        if (seen[start]) continue;
        components.emplace_back();
        auto& comp = components.back();
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            const long long idx = stack.back();
            stack.pop_back();
            comp.push_back(idx);
            const auto c = lat.unpack(idx);
            for (int a = 0; a < lat.dimension; ++a) {
                for (int s : {-1, 1}) {
                    auto n = c;
                    n[a] += s;
                    const long long nidx = lat.pack(n[0], n[1], n[2]);
                    if (config.grid[nidx] && !seen[nidx]) {
                        seen[nidx] = 1;
                        stack.push_back(nidx);
                    }
                }
            }
        }
    }
    std::stable_sort(components.begin(), components.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return components;
}

std::vector<DiscretizationRow> discretization_report(
    const lattice::ShapeSpec& shape, const ProblemSpec& spec,
    const std::vector<long long>& cell_counts)
{
    using lattice::ShapeSpec;
    double reference, radius_hint = 0.0;
    if (shape.kind == ShapeSpec::Kind::ball) {
        reference = spec.dimension == 3 ? analytic::ball_probability(spec)
                                        : analytic::disk_probability(spec);
    } else if (shape.kind == ShapeSpec::Kind::shell && spec.dimension == 3) {
        const oracle::ShellSpec shell(shape.inner_radius);
        reference = oracle::shell_probability(shell, spec);
        radius_hint = shell.outer_radius;
    } else {
        throw std::invalid_argument(
            "discretization_report: only ball and 3D shell shapes");
    }

    std::vector<DiscretizationRow> rows;
    for (long long m : cell_counts) {
        const auto lat = lattice::make_lattice(spec.dimension, spec.jump, m,
                                               radius_hint);
        const auto kernel = lattice::build_kernel(lat, spec, m);
        const auto config = lattice::init_shape(lat, m, shape);
        const double p = lattice::total_probability(config, kernel);
        rows.push_back({m, lat.cell_size, p, reference,
                        std::abs(p - reference) / reference});
    }
    return rows;
}

} // namespace ghop::analysis
