#include "ghop/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ghop::lattice {

namespace {

std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

bool Lattice::in_interior(const std::array<int, 3>& c) const
{
    for (int a = 0; a < dimension; ++a)
        if (c[a] < margin_cells || c[a] >= extents[a] - margin_cells) return false;
    return true;
}

Lattice make_lattice(int dimension, double jump, long long cells, double radius_hint)
{
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("make_lattice: dimension must be 2 or 3");
    if (jump <= 0.0) throw std::invalid_argument("make_lattice: jump must be positive");
    if (cells < 2) throw std::invalid_argument("make_lattice: need at least 2 cells");

    Lattice lat;
    lat.dimension = dimension;
    lat.cell_size = std::pow(static_cast<double>(cells), -1.0 / dimension);
    const double h = lat.cell_size;
    lat.margin_cells = static_cast<int>(std::ceil((jump + 2.0 * h) / h)) + 1;

    const double shape_radius = std::max(unit_ball_radius(dimension), radius_hint);
    const int half =
        static_cast<int>(std::ceil((shape_radius + 2.0 * h) / h)) + lat.margin_cells;
    for (int a = 0; a < 3; ++a) {
        lat.extents[a] = a < dimension ? 2 * half : 1;
        lat.origin[a] = a < dimension ? -half * h : -0.5 * h;
    }
    return lat;
}

void SpinConfiguration::move(long long from, long long to)
{
    if (from == to) throw std::invalid_argument("move: cells must be distinct");
    if (!grid[from]) throw std::invalid_argument("move: source cell not occupied");
    if (grid[to]) throw std::invalid_argument("move: target cell not empty");
    if (!lattice.in_interior(lattice.unpack(to)))
        throw std::invalid_argument("move: target cell outside the lattice interior");
    grid[from] = 0;
    grid[to] = 1;
    const int s = slot[from];
    slot[from] = -1;
    slot[to] = s;
    occupied[s] = to;
}

double smoothing_kernel(double x)
{
    if (std::abs(x) >= 2.0) return 0.0;
    return 0.25 * (1.0 + std::cos(0.5 * M_PI * x));
}

InteractionKernel build_kernel(const Lattice& lattice, const ProblemSpec& spec,
                               long long cells)
{
    if (lattice.dimension != spec.dimension)
        throw std::invalid_argument("build_kernel: lattice/spec dimension mismatch");
    const double h = lattice.cell_size, d = spec.jump;
    if (h >= 0.5 * d)
        throw std::invalid_argument(
            "build_kernel: requires h < d/2 so the kernel has no self-interaction");

    InteractionKernel kernel;
    kernel.dimension = lattice.dimension;
    kernel.jump = d;
    kernel.cell_size = h;
    kernel.cells = cells;

    const double m2 = static_cast<double>(cells) * static_cast<double>(cells);
    const double norm = 1.0 / (sphere_surface_area(spec.dimension, d) * m2 * h);
    const int rmax = static_cast<int>(std::floor((d + 2.0 * h) / h));
    const int kmax = lattice.dimension == 3 ? rmax : 0;
    for (int i = -rmax; i <= rmax; ++i) {
        for (int j = -rmax; j <= rmax; ++j) {
            for (int k = -kmax; k <= kmax; ++k) {
                const double len =
                    h * std::sqrt(static_cast<double>(i) * i +
                                  static_cast<double>(j) * j +
                                  static_cast<double>(k) * k);
                if (std::abs(len - d) >= 2.0 * h) continue;
                const double w = smoothing_kernel((len - d) / h) * norm;
                if (w <= 0.0) continue;  // rounding at the support edge
                kernel.offsets.push_back({i, j, k});
                kernel.weights.push_back(w);
                kernel.flat.push_back(lattice.pack(i, j, k));
            }
        }
    }
    return kernel;
}

double shape_extent(const ShapeSpec& shape, int dimension)
{
    const double r0 = unit_ball_radius(dimension);
    switch (shape.kind) {
    case ShapeSpec::Kind::ball:
        return r0;
    case ShapeSpec::Kind::shell: {
        const double rho = shape.inner_radius;
        return dimension == 3 ? std::cbrt(rho * rho * rho + r0 * r0 * r0)
                              : std::sqrt(rho * rho + r0 * r0);
    }
    case ShapeSpec::Kind::cog:
        return std::sqrt(r0 * r0 - 0.5 * shape.amplitude * shape.amplitude) +
               shape.amplitude;
    default:  // random_blob
        return 1.3 * r0;
    }
}

SpinConfiguration init_shape(const Lattice& lattice, long long cells,
                             const ShapeSpec& shape)
{
    const int dim = lattice.dimension;
    const double h = lattice.cell_size;
    const double r0 = unit_ball_radius(dim);

    double outer = 0.0;  // shell outer radius
    double bound;        // outermost radius the shape can reach
    switch (shape.kind) {
    case ShapeSpec::Kind::ball:
        bound = r0;
        break;
    case ShapeSpec::Kind::shell: {
        if (shape.inner_radius < 0.0)
            throw std::invalid_argument("init_shape: shell radius must be >= 0");
        const double rho = shape.inner_radius;
        outer = dim == 3 ? std::cbrt(rho * rho * rho + r0 * r0 * r0)
                         : std::sqrt(rho * rho + r0 * r0);
        bound = outer;
        break;
    }
    case ShapeSpec::Kind::cog:
        if (dim != 2)
            throw std::invalid_argument("init_shape: cog shapes are 2D only");
        if (shape.mode < 2 || shape.amplitude < 0.0)
            throw std::invalid_argument("init_shape: cog needs mode >= 2, amplitude >= 0");
        bound = std::sqrt(r0 * r0 - 0.5 * shape.amplitude * shape.amplitude) +
                shape.amplitude;
        break;
    case ShapeSpec::Kind::random_blob: {
        // Sprinkle within the largest disk/ball the interior can hold,
        // capped at 1.3x the unit radius.
        double room = 1e300;
        for (int a = 0; a < dim; ++a) {
            const double lo = lattice.origin[a] + lattice.margin_cells * h;
            const double hi =
                lattice.origin[a] + (lattice.extents[a] - lattice.margin_cells) * h;
            room = std::min(room, std::min(-lo, hi) - h);
        }
        bound = std::min(1.3 * r0, room);
        break;
    }
    default:
        throw std::invalid_argument("init_shape: unknown shape");
    }

    // The shape (plus one cell of slack) must fit inside the interior region.
    for (int a = 0; a < dim; ++a) {
        const double lo = lattice.origin[a] + lattice.margin_cells * h;
        const double hi =
            lattice.origin[a] + (lattice.extents[a] - lattice.margin_cells) * h;
        if (bound + h > std::min(-lo, hi))
            throw std::runtime_error("init_shape: shape does not fit within the "
                                     "lattice margin");
    }

    // Signed distance per interior cell; rank truncation picks exactly M.
    std::vector<std::pair<double, long long>> scored;
    scored.reserve(lattice.cell_count());
    for (long long idx = 0; idx < lattice.cell_count(); ++idx) {
        const auto c = lattice.unpack(idx);
        if (!lattice.in_interior(c)) continue;
        const auto p = lattice.center(idx);
        const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        double score;
        switch (shape.kind) {
        case ShapeSpec::Kind::ball:
            score = r - r0;
            break;
        case ShapeSpec::Kind::shell:
            score = std::max(shape.inner_radius - r, r - outer);
            break;
        case ShapeSpec::Kind::cog: {
            const double base =
                std::sqrt(r0 * r0 - 0.5 * shape.amplitude * shape.amplitude);
            const double theta = std::atan2(p[1], p[0]);
            score = r - (base + shape.amplitude * std::cos(shape.mode * theta));
            break;
        }
        default:  // random_blob
            if (r >= bound) continue;
            score = static_cast<double>(mix64(shape.seed ^ (0x9e37ULL * idx))) /
                    18446744073709551616.0;
            break;
        }
        scored.emplace_back(score, idx);
    }
    if (static_cast<long long>(scored.size()) < cells)
        throw std::runtime_error("init_shape: not enough interior cells for M");

    std::nth_element(scored.begin(), scored.begin() + cells, scored.end());
    std::sort(scored.begin(), scored.begin() + cells);

    SpinConfiguration config;
    config.lattice = lattice;
    config.grid.assign(lattice.cell_count(), 0);
    config.slot.assign(lattice.cell_count(), -1);
    config.occupied.reserve(cells);
    for (long long m = 0; m < cells; ++m) {
        const long long idx = scored[m].second;
        config.grid[idx] = 1;
        config.slot[idx] = static_cast<int>(m);
        config.occupied.push_back(idx);
    }
    return config;
}

} // namespace ghop::lattice
