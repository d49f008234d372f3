// Timing comparison of the serial reference evaluator against the
// OpenMP-parallel one, plus incremental-update throughput.
//
// Usage: bench_kernels [M] [d] [N] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ghop/lattice.hpp"

using namespace ghop;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv)
{
    const long long cells = argc > 1 ? std::atoll(argv[1]) : 40'000;
    const double jump = argc > 2 ? std::atof(argv[2]) : 0.5;
    const int dim = argc > 3 ? std::atoi(argv[3]) : 3;
    const int repeats = argc > 4 ? std::atoi(argv[4]) : 5;

    const ProblemSpec spec(dim, jump);
    const auto lat = lattice::make_lattice(dim, jump, cells);
    const auto kernel = lattice::build_kernel(lat, spec, cells);
    auto config = lattice::init_shape(lat, cells, lattice::ShapeSpec::ball());

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("N=%d d=%g M=%lld h=%g kernel_offsets=%zu threads=%d\n", dim,
                jump, cells, lat.cell_size, kernel.offsets.size(), threads);

    // Warm-up and agreement check.
    const double p_serial = lattice::total_probability_serial(config, kernel);
    const double p_parallel = lattice::total_probability(config, kernel);
    std::printf("P_serial   = %.17g\nP_parallel = %.17g (bit-identical: %s)\n",
                p_serial, p_parallel, p_serial == p_parallel ? "yes" : "NO");

    double t_serial = 0.0, t_parallel = 0.0;
    double sink = 0.0;
    for (int r = 0; r < repeats; ++r) {
        auto start = Clock::now();
        sink += lattice::total_probability_serial(config, kernel);
        t_serial += seconds_since(start);
        start = Clock::now();
        sink += lattice::total_probability(config, kernel);
        t_parallel += seconds_since(start);
    }
    t_serial /= repeats;
    t_parallel /= repeats;
    std::printf("full evaluation: serial %.4f s, parallel %.4f s, speedup %.2fx\n",
                t_serial, t_parallel, t_serial / t_parallel);

    // Incremental updates: random valid moves, applied so the state evolves.
    std::mt19937_64 rng(2026);
    std::uniform_int_distribution<long long> pick(0, cells - 1);
    std::uniform_int_distribution<long long> cell(0, lat.cell_count() - 1);
    const int moves = 20'000;
    const auto start = Clock::now();
    for (int m = 0; m < moves; ++m) {
        const long long from = config.occupied[pick(rng)];
        long long to;
        do {
            to = cell(rng);
        } while (config.is_occupied(to) || !lat.in_interior(lat.unpack(to)));
        sink += lattice::move_delta(config, kernel, from, to);
        config.move(from, to);
    }
    const double t_moves = seconds_since(start);
    std::printf("incremental: %d moves in %.4f s (%.0f moves/s, "
                "%.0fx cheaper than full)\n",
                moves, t_moves, moves / t_moves,
                t_serial / (t_moves / moves));
    volatile double guard = sink;  // keep the timed work observable
    (void)guard;
    return 0;
}
