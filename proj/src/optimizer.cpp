#include "ghop/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ghop::optimizer {

using lattice::InteractionKernel;
using lattice::SpinConfiguration;

namespace {

std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool is_boundary(const SpinConfiguration& config, long long idx)
{
    const auto& lat = config.lattice;
    const auto c = lat.unpack(idx);
    for (int a = 0; a < lat.dimension; ++a) {
        for (int s : {-1, 1}) {
            auto n = c;
            n[a] += s;
            if (!config.grid[lat.pack(n[0], n[1], n[2])]) return true;
        }
    }
    return false;
}

// Nonzero offsets of the Chebyshev-2 neighborhood, per dimension.
const std::vector<std::array<int, 3>>& chebyshev2(int dim)
{
    static const auto make = [](int d) {
        std::vector<std::array<int, 3>> v;
        const int kz = d == 3 ? 2 : 0;
        for (int i = -2; i <= 2; ++i)
            for (int j = -2; j <= 2; ++j)
                for (int k = -kz; k <= kz; ++k)
                    if (i || j || k) v.push_back({i, j, k});
        return v;
    };
    static const auto v2 = make(2), v3 = make(3);
    return dim == 3 ? v3 : v2;
}

struct SweepBox {
    int lo[3], hi[3];  // inclusive global-move target ranges per axis
};

SweepBox occupied_box(const SpinConfiguration& config)
{
    const auto& lat = config.lattice;
    SweepBox box;
    for (int a = 0; a < 3; ++a) {
        box.lo[a] = lat.extents[a];
        box.hi[a] = -1;
    }
    for (long long idx : config.occupied) {
        const auto c = lat.unpack(idx);
        for (int a = 0; a < 3; ++a) {
            box.lo[a] = std::min(box.lo[a], c[a]);
            box.hi[a] = std::max(box.hi[a], c[a]);
        }
    }
    // Expand by the kernel reach and clamp to the interior.
    for (int a = 0; a < lat.dimension; ++a) {
        box.lo[a] = std::max(box.lo[a] - lat.margin_cells, lat.margin_cells);
        box.hi[a] = std::min(box.hi[a] + lat.margin_cells,
                             lat.extents[a] - lat.margin_cells - 1);
    }
    if (lat.dimension == 2) box.lo[2] = box.hi[2] = 0;
    return box;
}

// One proposal; returns true with (from, to) filled iff the proposal is
// valid (distinct cells, target empty and in the interior).
bool propose(const SpinConfiguration& config, const SweepBox& box,
             std::mt19937_64& rng, long long& from, long long& to)
{
    const auto& lat = config.lattice;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<long long> pick(0, config.occupied_count() - 1);

    if (unif(rng) < 0.8) {
        // Local: boundary source, target in its Chebyshev-2 neighborhood.
        from = -1;
        for (int attempt = 0; attempt < 64; ++attempt) {
            const long long cand = config.occupied[pick(rng)];
            if (is_boundary(config, cand)) {
                from = cand;
                break;
            }
        }
        if (from < 0) return false;
        const auto& offs = chebyshev2(lat.dimension);
        std::uniform_int_distribution<std::size_t> po(0, offs.size() - 1);
        const auto& o = offs[po(rng)];
        const auto c = lat.unpack(from);
        const std::array<int, 3> n{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
        if (!lat.in_interior(n)) return false;
        to = lat.pack(n[0], n[1], n[2]);
    } else {
        // Global: any source, target anywhere in the expanded bounding box.
        from = config.occupied[pick(rng)];
        std::array<int, 3> n{0, 0, 0};
        for (int a = 0; a < lat.dimension; ++a) {
            std::uniform_int_distribution<int> pa(box.lo[a], box.hi[a]);
            n[a] = pa(rng);
        }
        to = lat.pack(n[0], n[1], n[2]);
        if (!lat.in_interior(n)) return false;
    }
    return !config.is_occupied(to);
}

std::string save_rng(const std::mt19937_64& rng)
{
    std::ostringstream os;
    os << rng;
    return os.str();
}

void restore_rng(std::mt19937_64& rng, const std::string& state)
{
    std::istringstream is(state);
    is >> rng;
    if (!is) throw std::runtime_error("invalid stored RNG state");
}

} // namespace

void AnnealSchedule::validate() const
{
    if (!(t_start > t_end) || !(t_end > 0.0))
        throw std::invalid_argument("AnnealSchedule: need t_start > t_end > 0");
    if (cooling_factor <= 0.0 || cooling_factor >= 1.0)
        throw std::invalid_argument("AnnealSchedule: cooling factor must be in (0,1)");
    if (steps_per_temperature < 1 || max_sweeps < 0)
        throw std::invalid_argument("AnnealSchedule: nonpositive step counts");
}

void TemperingConfig::validate() const
{
    if (temperatures.empty())
        throw std::invalid_argument("TemperingConfig: no temperatures");
    for (std::size_t i = 0; i < temperatures.size(); ++i) {
        if (!(temperatures[i] > 0.0))
            throw std::invalid_argument("TemperingConfig: temperatures must be > 0");
        if (i > 0 && !(temperatures[i] > temperatures[i - 1]))
            throw std::invalid_argument("TemperingConfig: temperatures must ascend");
    }
    if (swap_interval < 1 || rounds < 0)
        throw std::invalid_argument("TemperingConfig: nonpositive intervals");
}

SweepResult metropolis_sweep(SpinConfiguration& config, const InteractionKernel& kernel,
                             double t, std::mt19937_64& rng)
{
    if (!(t > 0.0)) throw std::invalid_argument("metropolis_sweep: need T > 0");
    const SweepBox box = occupied_box(config);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SweepResult result{0, 0.0};
    const long long m = config.occupied_count();
    for (long long step = 0; step < m; ++step) {
        long long from, to;
        if (!propose(config, box, rng, from, to)) continue;
        const double delta = lattice::move_delta(config, kernel, from, to);
        if (delta >= 0.0 || unif(rng) < std::exp(delta / t)) {
            config.move(from, to);
            ++result.accepted;
            result.delta_accumulated += delta;
        }
    }
    return result;
}

AnnealSchedule default_schedule(const SpinConfiguration& initial,
                                const InteractionKernel& kernel,
                                unsigned long long seed)
{
    std::mt19937_64 rng(mix64(seed ^ 0x70726f6265ULL));
    const SweepBox box = occupied_box(initial);
    double sum = 0.0;
    int found = 0;
    for (int probe = 0; probe < 4000 && found < 1000; ++probe) {
        long long from, to;
        if (!propose(initial, box, rng, from, to)) continue;
        sum += std::abs(lattice::move_delta(initial, kernel, from, to));
        ++found;
    }
    if (found == 0)
        throw std::runtime_error("default_schedule: no valid probe moves found");
    double typical = sum / found;
    if (typical <= 0.0) typical = 1.0 / (double(kernel.cells) * double(kernel.cells));
    AnnealSchedule schedule;
    schedule.t_start = 10.0 * typical;
    schedule.t_end = 1e-4 * schedule.t_start;
    return schedule;
}

RunRecord anneal(const SpinConfiguration& initial, const InteractionKernel& kernel,
                 const AnnealSchedule& schedule, unsigned long long seed,
                 const std::function<bool(const AnnealState&)>& hook,
                 long long checkpoint_interval, const AnnealState* resume)
{
    schedule.validate();

    RunRecord record;
    record.master_seed = seed;

    SpinConfiguration config = resume ? resume->config : initial;
    std::mt19937_64 rng(mix64(seed));
    double t = schedule.t_start;
    long long sweep = 0;
    double current = lattice::total_probability_serial(config, kernel);
    double best = resume ? resume->best_probability : current;
    SpinConfiguration best_config = resume ? resume->best_configuration : config;
    if (resume) {
        restore_rng(rng, resume->rng_state);
        t = resume->temperature;
        sweep = resume->sweep_index;
        current = resume->current_probability;
        record.probability_trace = resume->probability_trace;
        record.acceptance_trace = resume->acceptance_trace;
        record.best_trace = resume->best_trace;
    }

    // Temperature and resync points are functions of the absolute sweep
    // index so a resumed run retraces the uninterrupted one exactly.
    while (sweep < schedule.max_sweeps) {
        const long long stage = sweep / schedule.steps_per_temperature;
        t = schedule.t_start * std::pow(schedule.cooling_factor,
                                        static_cast<double>(stage));
        if (!(t > schedule.t_end)) break;
        {
            const auto r = metropolis_sweep(config, kernel, t, rng);
            current += r.delta_accumulated;
            ++sweep;
            if (sweep % 64 == 0)
                current = lattice::total_probability_serial(config, kernel);
            if (current > best) {
                best = current;
                best_config = config;
            }
            record.probability_trace.push_back(current);
            record.acceptance_trace.push_back(
                static_cast<double>(r.accepted) / config.occupied_count());
            record.best_trace.push_back(best);

            if (hook && checkpoint_interval > 0 && sweep % checkpoint_interval == 0) {
                AnnealState state;
                state.config = config;
                state.temperature = t;
                state.sweep_index = sweep;
                state.current_probability = current;
                state.best_probability = best;
                state.best_configuration = best_config;
                state.rng_state = save_rng(rng);
                state.probability_trace = record.probability_trace;
                state.acceptance_trace = record.acceptance_trace;
                state.best_trace = record.best_trace;
                if (!hook(state)) {
                    record.interrupted = true;
                    goto done;
                }
            }
        }
    }
done:
    record.final_configuration = std::move(config);
    record.final_probability =
        lattice::total_probability_serial(record.final_configuration, kernel);
    record.best_probability =
        lattice::total_probability_serial(best_config, kernel);
    if (record.final_probability > record.best_probability) {
        record.best_probability = record.final_probability;
        record.best_configuration = record.final_configuration;
    } else {
        record.best_configuration = std::move(best_config);
    }
    return record;
}

std::mt19937_64 replica_rng(unsigned long long master_seed, int replica)
{
    return std::mt19937_64(mix64(master_seed ^ (0xabcd1234ULL * (replica + 1))));
}

RunRecord parallel_tempering(const std::vector<SpinConfiguration>& initials,
                             const InteractionKernel& kernel,
                             const TemperingConfig& config, unsigned long long seed,
                             const std::function<bool(const TemperingState&)>& hook,
                             long long checkpoint_interval,
                             const TemperingState* resume)
{
    config.validate();
    const int n = static_cast<int>(config.temperatures.size());
    if (static_cast<int>(initials.size()) != n)
        throw std::invalid_argument(
            "parallel_tempering: one initial configuration per temperature");
    if (resume && static_cast<int>(resume->replicas.size()) != n)
        throw std::invalid_argument("parallel_tempering: resume replica count "
                                    "does not match the temperature ladder");

    std::vector<SpinConfiguration> replicas = resume ? resume->replicas : initials;
    std::vector<std::mt19937_64> rngs;
    std::vector<double> current(n);
    for (int r = 0; r < n; ++r) {
        rngs.push_back(replica_rng(seed, r));
        current[r] = lattice::total_probability_serial(replicas[r], kernel);
    }
    std::mt19937_64 swap_rng(mix64(seed ^ 0x73776170ULL));

    RunRecord record;
    record.master_seed = seed;
    double best = current[0];
    SpinConfiguration best_config = replicas[0];
    for (int r = 1; r < n; ++r)
        if (current[r] > best) {
            best = current[r];
            best_config = replicas[r];
        }
    long long start_round = 0;
    if (resume) {
        for (int r = 0; r < n; ++r) restore_rng(rngs[r], resume->rng_states[r]);
        restore_rng(swap_rng, resume->swap_rng_state);
        start_round = resume->round;
        current = resume->current;
        best = resume->best_probability;
        best_config = resume->best_configuration;
        record.probability_trace = resume->probability_trace;
        record.acceptance_trace = resume->acceptance_trace;
        record.best_trace = resume->best_trace;
    }

    bool interrupted = false;
    for (long long round = start_round; round < config.rounds && !interrupted;
         ++round) {
        // Replicas are independent between swap points; deterministic
        // per-replica streams keep the result thread-count independent.
        std::vector<long long> accepted(n, 0);
#pragma omp parallel for schedule(static)
        for (int r = 0; r < n; ++r) {
            for (long long s = 0; s < config.swap_interval; ++s) {
                const auto res = metropolis_sweep(replicas[r], kernel,
                                                  config.temperatures[r], rngs[r]);
                current[r] += res.delta_accumulated;
                accepted[r] += res.accepted;
            }
            current[r] = lattice::total_probability_serial(replicas[r], kernel);
        }
        long long accepted_total = 0;
        for (int r = 0; r < n; ++r) accepted_total += accepted[r];
        for (int r = 0; r < n; ++r)
            if (current[r] > best) {
                best = current[r];
                best_config = replicas[r];
            }

        // Adjacent swaps, alternating parity; cold replica is index r.
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int r = static_cast<int>(round % 2); r + 1 < n; r += 2) {
            const double beta_diff =
                1.0 / config.temperatures[r] - 1.0 / config.temperatures[r + 1];
            const double log_accept = beta_diff * (current[r + 1] - current[r]);
            if (log_accept >= 0.0 || unif(swap_rng) < std::exp(log_accept)) {
                std::swap(replicas[r], replicas[r + 1]);
                std::swap(current[r], current[r + 1]);
            }
        }
        record.probability_trace.push_back(current[0]);
        record.best_trace.push_back(best);
        record.acceptance_trace.push_back(
            static_cast<double>(accepted_total) /
            (static_cast<double>(n) * config.swap_interval *
             replicas[0].occupied_count()));

        if (hook && checkpoint_interval > 0 &&
            (round + 1) % checkpoint_interval == 0) {
            TemperingState state;
            state.replicas = replicas;
            for (int r = 0; r < n; ++r) state.rng_states.push_back(save_rng(rngs[r]));
            state.swap_rng_state = save_rng(swap_rng);
            state.round = round + 1;
            state.current = current;
            state.best_probability = best;
            state.best_configuration = best_config;
            state.probability_trace = record.probability_trace;
            state.acceptance_trace = record.acceptance_trace;
            state.best_trace = record.best_trace;
            if (!hook(state)) interrupted = true;
        }
    }
    record.interrupted = interrupted;

    record.best_probability = best;
    record.best_configuration = std::move(best_config);
    record.final_configuration = std::move(replicas[0]);
    record.final_probability = current[0];
    return record;
}

} // namespace ghop::optimizer
