#pragma once

// Discrete lawn model: grid cells carrying conserved spins, the smoothed
// jump-distance kernel, and full/incremental evaluation of the discrete
// pair-probability functional.

#include <array>
#include <cstdint>
#include <vector>

#include "ghop/problem.hpp"

namespace ghop::lattice {

/// Regular grid of cubic cells. Cell (i,j,k) has its center at
/// origin[a] + (index[a] + 0.5) * cell_size. In 2D extents[2] == 1 and the
/// third index is always 0.
struct Lattice {
    int dimension;
    double cell_size;               // h
    std::array<int, 3> extents;     // cells per axis
    std::array<double, 3> origin;   // lower corner
    int margin_cells;               // guaranteed-empty border thickness

    long long cell_count() const
    {
        return static_cast<long long>(extents[0]) * extents[1] * extents[2];
    }
    long long pack(int i, int j, int k) const
    {
        return (static_cast<long long>(i) * extents[1] + j) * extents[2] + k;
    }
    std::array<int, 3> unpack(long long idx) const
    {
        const int k = static_cast<int>(idx % extents[2]);
        idx /= extents[2];
        const int j = static_cast<int>(idx % extents[1]);
        return {static_cast<int>(idx / extents[1]), j, k};
    }
    std::array<double, 3> center(long long idx) const
    {
        const auto c = unpack(idx);
        return {origin[0] + (c[0] + 0.5) * cell_size,
                origin[1] + (c[1] + 0.5) * cell_size,
                origin[2] + (c[2] + 0.5) * cell_size};
    }
    /// True iff the cell is at least margin_cells away from every grid face
    /// (occupied cells must stay in this region).
    bool in_interior(const std::array<int, 3>& c) const;
};

/// Builds a grid for M occupied cells of total volume 1: h = M^{-1/N}, grid
/// half-width covering max(unit-ball radius, radius_hint) plus an empty
/// margin of at least d + 2h on every side.
Lattice make_lattice(int dimension, double jump, long long cells,
                     double radius_hint = 0.0);

/// Occupancy state: dense bit-grid for O(1) membership plus a flat list of
/// occupied cells for O(1) random sampling. The occupied count is conserved;
/// the only mutation is exchanging an occupied cell for an empty one.
struct SpinConfiguration {
    Lattice lattice;
    std::vector<std::uint8_t> grid;   // one byte per cell, 0 or 1
    std::vector<long long> occupied;  // flat indices, arbitrary order
    std::vector<int> slot;            // cell -> position in `occupied`, -1 if empty

    long long occupied_count() const
    {
        return static_cast<long long>(occupied.size());
    }
    bool is_occupied(long long idx) const { return grid[idx] != 0; }

    /// Exchange move: `from` becomes empty, `to` becomes occupied.
    /// Preconditions checked; `to` must lie in the lattice interior.
    void move(long long from, long long to);
};

/// One-dimensional smoothed delta: (1 + cos(pi x / 2)) / 4 on |x| <= 2.
double smoothing_kernel(double x);

/// Precomputed interaction offsets: all integer displacements whose length
/// falls in the annulus d - 2h < |delta| h < d + 2h, with weights
/// w = phi((|delta| h - d) / h) / (S(N, d) M^2 h).
struct InteractionKernel {
    int dimension;
    double jump;
    double cell_size;
    long long cells;                           // M
    std::vector<std::array<int, 3>> offsets;   // closed under negation
    std::vector<double> weights;
    std::vector<long long> flat;               // pack()-space displacements
};

/// Enumerates the annulus for the given lattice. Requires h < d/2 so the
/// zero offset is never in range.
InteractionKernel build_kernel(const Lattice& lattice, const ProblemSpec& spec,
                               long long cells);

/// Canonical initial shapes, rasterized by rank truncation: interior cells
/// sorted by (signed distance to the shape, flat index) and the first M
/// taken, so the occupied count is exact and platform-independent.
struct ShapeSpec {
    enum class Kind { ball, shell, cog, random_blob };
    Kind kind;
    double inner_radius = 0.0;       // shell
    int mode = 0;                    // cog
    double amplitude = 0.0;          // cog
    unsigned long long seed = 0;     // random_blob

    static ShapeSpec ball() { return {Kind::ball}; }
    static ShapeSpec shell(double rho) { return {Kind::shell, rho}; }
    static ShapeSpec cog(int n, double eps) { return {Kind::cog, 0.0, n, eps}; }
    static ShapeSpec random_blob(unsigned long long seed)
    {
        return {Kind::random_blob, 0.0, 0, 0.0, seed};
    }
};

/// Outermost radius the shape can reach; pass as radius_hint to
/// make_lattice so the shape fits inside the margin.
double shape_extent(const ShapeSpec& shape, int dimension);

SpinConfiguration init_shape(const Lattice& lattice, long long cells,
                             const ShapeSpec& shape);

/// Full evaluation of the discrete functional: sum of w(r_i - r_j) over
/// ordered occupied pairs. OpenMP over fixed blocks of the occupied list;
/// block sums are accumulated serially so the result is bit-identical for
/// any thread count.
double total_probability(const SpinConfiguration& config,
                         const InteractionKernel& kernel);

/// Serial reference implementation (same block structure, no threads).
double total_probability_serial(const SpinConfiguration& config,
                                const InteractionKernel& kernel);

/// Probability change of the exchange move `from` -> `to`:
///   2 sum_{k occupied, k != from} [w(r_to - r_k) - w(r_from - r_k)].
/// Cost is two kernel scans. Both cells must be in the interior, `from`
/// occupied, `to` empty, and the two distinct.
double move_delta(const SpinConfiguration& config, const InteractionKernel& kernel,
                  long long from, long long to);

} // namespace ghop::lattice
