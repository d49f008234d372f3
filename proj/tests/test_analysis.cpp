#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ghop/analysis.hpp"
#include "ghop/analytic.hpp"
#include "ghop/oracle.hpp"

using namespace ghop;
using namespace ghop::lattice;
using namespace ghop::analysis;

namespace {

SpinConfiguration from_cells(const Lattice& lat, const std::vector<long long>& cells)
{
    SpinConfiguration c;
    c.lattice = lat;
    c.grid.assign(lat.cell_count(), 0);
    c.slot.assign(lat.cell_count(), -1);
    for (long long idx : cells) {
        c.grid[idx] = 1;
        c.slot[idx] = static_cast<int>(c.occupied.size());
        c.occupied.push_back(idx);
    }
    return c;
}

} // namespace

TEST_CASE("boundary of a rectangle is its perimeter")
{
    const auto lat = make_lattice(2, 0.4, 400);
    const int c0 = lat.extents[0] / 2;
    std::vector<long long> cells;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 5; ++j) cells.push_back(lat.pack(c0 + i, c0 + j, 0));
    const auto config = from_cells(lat, cells);
    const auto boundary = boundary_cells(config);
    CHECK(boundary.size() == 2 * 8 + 2 * 5 - 4);
    for (long long idx : boundary) {
        const auto c = lat.unpack(idx);
        const bool edge = c[0] == c0 || c[0] == c0 + 7 || c[1] == c0 || c[1] == c0 + 4;
        CHECK(edge);
    }

    const auto lone = from_cells(lat, {lat.pack(c0, c0, 0)});
    CHECK(boundary_cells(lone) == std::vector<long long>{lat.pack(c0, c0, 0)});
}

TEST_CASE("rasterized ball boundary radii stay within 2h")
{
    const long long m = 40'000;
    const auto lat = make_lattice(3, 0.3, m);
    const auto config = init_shape(lat, m, ShapeSpec::ball());
    const double r0 = unit_ball_radius(3);
    const auto report = radial_histogram(config, 64);
    CHECK(report.boundary.size() == report.radii.size());
    long long total = 0;
    for (long long c : report.counts) total += c;
    CHECK(total == static_cast<long long>(report.boundary.size()));
    for (double r : report.radii) CHECK(std::abs(r - r0) <= 2.0 * lat.cell_size);
    CHECK(mass_outside_windows(report, {r0}, lat.cell_size) < 0.05);
    CHECK(is_isotropic(report, {r0}, lat.cell_size));
}

TEST_CASE("rasterized shell shows two radial peaks at the analytic radii")
{
    const long long m = 40'000;
    const double d = 1.39 * unit_ball_radius(3);
    const auto [rho, p] = oracle::optimal_shell_radius(d);
    const oracle::ShellSpec shell(rho);
    const auto lat = make_lattice(3, d, m, shell.outer_radius);
    const auto config = init_shape(lat, m, ShapeSpec::shell(rho));
    const auto report = radial_histogram(config, 64);
    CHECK(mass_outside_windows(report, {shell.inner_radius, shell.outer_radius},
                               lat.cell_size) < 0.05);
    // Far from isotropic about a single radius.
    CHECK(!is_isotropic(report, {0.5 * (shell.inner_radius + shell.outer_radius)},
                        lat.cell_size));
}

TEST_CASE("radial histogram input validation")
{
    const auto lat = make_lattice(2, 0.4, 100);
    SpinConfiguration empty;
    empty.lattice = lat;
    empty.grid.assign(lat.cell_count(), 0);
    empty.slot.assign(lat.cell_count(), -1);
    CHECK_THROWS_AS(radial_histogram(empty, 64), std::invalid_argument);
    const auto config = init_shape(lat, 100, ShapeSpec::ball());
    CHECK_THROWS_AS(radial_histogram(config, 5), std::invalid_argument);
}

TEST_CASE("cog spectrum round trip")
{
    const long long m = 10'000;
    const auto shape = ShapeSpec::cog(9, 0.05);
    const auto lat = make_lattice(2, 0.4, m, shape_extent(shape, 2));
    const auto config = init_shape(lat, m, shape);
    const auto spectrum = cog_spectrum(config);
    CHECK(spectrum.dominant_mode == 9);
    CHECK(spectrum.dominant_amplitude == doctest::Approx(0.05).epsilon(0.10));
    CHECK(spectrum.mean_radius ==
          doctest::Approx(std::sqrt(unit_ball_radius(2) * unit_ball_radius(2) -
                                    0.5 * 0.05 * 0.05))
              .epsilon(0.02));
}

TEST_CASE("cog spectrum noise floor and invariances")
{
    const long long m = 10'000;
    const auto lat = make_lattice(2, 0.4, m);
    const auto config = init_shape(lat, m, ShapeSpec::ball());
    const auto spectrum = cog_spectrum(config);
    for (int n = 2; n < static_cast<int>(spectrum.amplitudes.size()); ++n)
        CHECK(spectrum.amplitudes[n] <= 2.0 * lat.cell_size);

    // Translation invariance.
    SpinConfiguration shifted;
    shifted.lattice = lat;
    shifted.grid.assign(lat.cell_count(), 0);
    shifted.slot.assign(lat.cell_count(), -1);
    const long long shift = lat.pack(3, -2, 0);
    for (long long idx : config.occupied) {
        const long long s = idx + shift;
        shifted.grid[s] = 1;
        shifted.slot[s] = static_cast<int>(shifted.occupied.size());
        shifted.occupied.push_back(s);
    }
    const auto spec2 = cog_spectrum(shifted);
    REQUIRE(spec2.amplitudes.size() == spectrum.amplitudes.size());
    for (std::size_t n = 0; n < spectrum.amplitudes.size(); ++n)
        CHECK(std::abs(spec2.amplitudes[n] - spectrum.amplitudes[n]) < 1e-10);

    // Relabeling (occupied-list order) invariance.
    auto relabeled = config;
    std::reverse(relabeled.occupied.begin(), relabeled.occupied.end());
    for (std::size_t i = 0; i < relabeled.occupied.size(); ++i)
        relabeled.slot[relabeled.occupied[i]] = static_cast<int>(i);
    CHECK(cog_spectrum(relabeled).amplitudes == spectrum.amplitudes);
}

TEST_CASE("cog spectrum rejects non-star-shaped boundaries")
{
    // A hollow annulus has two radii per angular bin.
    const long long m = 10'000;
    const auto lat = make_lattice(2, 0.8, m, 0.8);
    const auto config = init_shape(lat, m, ShapeSpec::shell(0.4));
    CHECK_THROWS_AS(cog_spectrum(config), std::runtime_error);

    const auto lat3 = make_lattice(3, 0.4, 1000);
    const auto ball3 = init_shape(lat3, 1000, ShapeSpec::ball());
    CHECK_THROWS_AS(cog_spectrum(ball3), std::invalid_argument);
}

TEST_CASE("connected components")
{
    const auto lat = make_lattice(2, 0.4, 2'000);
    const auto ball = init_shape(lat, 2'000, ShapeSpec::ball());
    CHECK(connected_components(ball).size() == 1);

    // Two disjoint blobs: the ball plus a far-away 2x2 block.
    std::vector<long long> cells = ball.occupied;
    const int edge = lat.margin_cells;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) cells.push_back(lat.pack(edge + i, edge + j, 0));
    const auto two = from_cells(lat, cells);
    const auto comps = connected_components(two);
    CHECK(comps.size() == 2);
    CHECK(comps[0].size() == ball.occupied.size());  // largest first
    CHECK(comps[1].size() == 4);
}

TEST_CASE("discretization error shrinks with resolution")
{
    const ProblemSpec spec(3, 0.5);
    const auto rows = discretization_report(ShapeSpec::ball(), spec,
                                            {5'000, 20'000, 80'000});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].relative_deviation > rows[1].relative_deviation);
    CHECK(rows[1].relative_deviation > rows[2].relative_deviation);
    CHECK(rows[2].relative_deviation < 0.01);
    CHECK(rows[1].reference ==
          doctest::Approx(analytic::ball_probability(spec)).epsilon(1e-14));

    CHECK_THROWS_AS(discretization_report(ShapeSpec::cog(5, 0.01), spec, {1000}),
                    std::invalid_argument);
}
