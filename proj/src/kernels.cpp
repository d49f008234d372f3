#include <stdexcept>

#include "ghop/lattice.hpp"

// Hot loops of the discrete functional. Both evaluators accumulate per-block
// partial sums over fixed 1024-cell blocks of the occupied list and then add
// the blocks in index order, so the parallel result is bit-identical to the
// serial one for any thread count.

namespace ghop::lattice {

namespace {

constexpr long long kBlock = 1024;

void check_match(const SpinConfiguration& config, const InteractionKernel& kernel)
{
    if (config.lattice.dimension != kernel.dimension ||
        config.lattice.cell_size != kernel.cell_size ||
        config.occupied_count() != kernel.cells)
        throw std::invalid_argument("kernel does not match the configuration");
}

double block_sum(const SpinConfiguration& config, const InteractionKernel& kernel,
                 long long begin, long long end)
{
    const std::uint8_t* grid = config.grid.data();
    const long long* flat = kernel.flat.data();
    const double* w = kernel.weights.data();
    const std::size_t nk = kernel.flat.size();
    double sum = 0.0;
    for (long long m = begin; m < end; ++m) {
        const long long base = config.occupied[m];
        for (std::size_t t = 0; t < nk; ++t)
            if (grid[base + flat[t]]) sum += w[t];
    }
    return sum;
}

} // namespace

double total_probability_serial(const SpinConfiguration& config,
                                const InteractionKernel& kernel)
{
    check_match(config, kernel);
    const long long n = config.occupied_count();
    double total = 0.0;
    for (long long b = 0; b < n; b += kBlock)
        total += block_sum(config, kernel, b, std::min(b + kBlock, n));
    return total;
}

double total_probability(const SpinConfiguration& config,
                         const InteractionKernel& kernel)
{
    check_match(config, kernel);
    const long long n = config.occupied_count();
    const long long blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < blocks; ++b)
        partial[b] = block_sum(config, kernel, b * kBlock,
                               std::min((b + 1) * kBlock, n));
    double total = 0.0;
    for (long long b = 0; b < blocks; ++b) total += partial[b];
    return total;
}

double move_delta(const SpinConfiguration& config, const InteractionKernel& kernel,
                  long long from, long long to)
{
    check_match(config, kernel);
    if (from == to) throw std::invalid_argument("move_delta: cells must be distinct");
    if (!config.is_occupied(from))
        throw std::invalid_argument("move_delta: source cell not occupied");
    if (config.is_occupied(to))
        throw std::invalid_argument("move_delta: target cell not empty");
    if (!config.lattice.in_interior(config.lattice.unpack(from)) ||
        !config.lattice.in_interior(config.lattice.unpack(to)))
        throw std::invalid_argument("move_delta: cells outside the lattice interior");

    const std::uint8_t* grid = config.grid.data();
    const long long* flat = kernel.flat.data();
    const double* w = kernel.weights.data();
    const std::size_t nk = kernel.flat.size();
    double delta = 0.0;
    for (std::size_t t = 0; t < nk; ++t) {
        const long long a = to + flat[t];
        const long long b = from + flat[t];
        // `from` no longer interacts after the move; `to` never interacted
        // before it (it is empty), so only true neighbors contribute.
        if (grid[a] && a != from) delta += w[t];
        if (grid[b]) delta -= w[t];
    }
    return 2.0 * delta;
}

} // namespace ghop::lattice
