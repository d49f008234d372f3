#pragma once

// Ground-state search for the discrete lawn functional (H = -P): Metropolis
// exchange dynamics at fixed temperature, geometric-cooling simulated
// annealing, and parallel tempering with replica exchange.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ghop/lattice.hpp"

namespace ghop::optimizer {

struct AnnealSchedule {
    double t_start;
    double t_end;
    long long steps_per_temperature = 1;  // sweeps at each temperature
    double cooling_factor = 0.95;
    long long max_sweeps = 1'000'000;

    void validate() const;  // throws std::invalid_argument
};

struct TemperingConfig {
    std::vector<double> temperatures;  // strictly ascending, all > 0
    long long swap_interval = 1;       // sweeps between swap rounds
    long long rounds = 100;            // swap rounds to run

    void validate() const;
};

struct SweepResult {
    long long accepted;
    double delta_accumulated;
};

/// One Metropolis sweep: M proposals from the 80% local / 20% global
/// mixture, each accepted with min(1, exp(dP/T)). Invalid proposals
/// (occupied target, outside the interior) count as rejected.
SweepResult metropolis_sweep(lattice::SpinConfiguration& config,
                             const lattice::InteractionKernel& kernel, double t,
                             std::mt19937_64& rng);

/// T_start = 10 x (mean |dP| over 10^3 probe moves), per the self-calibrating
/// default; t_end = 1e-4 t_start, gamma = 0.95, one sweep per temperature.
AnnealSchedule default_schedule(const lattice::SpinConfiguration& initial,
                                const lattice::InteractionKernel& kernel,
                                unsigned long long seed);

struct RunRecord {
    unsigned long long master_seed = 0;
    double best_probability = 0.0;
    lattice::SpinConfiguration best_configuration;
    double final_probability = 0.0;
    lattice::SpinConfiguration final_configuration;
    std::vector<double> probability_trace;  // running P after each sweep
    std::vector<double> acceptance_trace;   // acceptance fraction per sweep
    std::vector<double> best_trace;         // best-so-far after each sweep
    bool interrupted = false;
};

/// Mid-run snapshot for checkpointing; complete enough to resume bit-exactly.
struct AnnealState {
    lattice::SpinConfiguration config;
    double temperature = 0.0;
    long long sweep_index = 0;
    double current_probability = 0.0;
    double best_probability = 0.0;
    lattice::SpinConfiguration best_configuration;
    std::string rng_state;  // serialized engine
    std::vector<double> probability_trace;
    std::vector<double> acceptance_trace;
    std::vector<double> best_trace;
};

/// Geometric-cooling annealing run tracking the best-ever configuration.
/// If checkpoint_interval > 0, `hook` is called with the full state every
/// that many sweeps; returning false stops the run (record.interrupted set).
/// Pass `resume` to continue from a previous snapshot (seed is then ignored
/// in favor of the stored engine state).
RunRecord anneal(const lattice::SpinConfiguration& initial,
                 const lattice::InteractionKernel& kernel,
                 const AnnealSchedule& schedule, unsigned long long seed,
                 const std::function<bool(const AnnealState&)>& hook = {},
                 long long checkpoint_interval = 0,
                 const AnnealState* resume = nullptr);

/// Independent per-replica stream derived from the master seed.
std::mt19937_64 replica_rng(unsigned long long master_seed, int replica);

/// Mid-run snapshot of a tempering run; complete enough to resume exactly.
struct TemperingState {
    std::vector<lattice::SpinConfiguration> replicas;
    std::vector<std::string> rng_states;
    std::string swap_rng_state;
    long long round = 0;
    std::vector<double> current;
    double best_probability = 0.0;
    lattice::SpinConfiguration best_configuration;
    std::vector<double> probability_trace;
    std::vector<double> acceptance_trace;
    std::vector<double> best_trace;
};

/// Replica-exchange run: each replica sweeps at its own temperature;
/// every swap_interval sweeps, adjacent pairs attempt an exchange with
/// acceptance min(1, exp((1/T_a - 1/T_b)(P_b - P_a))) so high-probability
/// configurations flow toward low temperature. One initial per temperature.
/// Hook/checkpoint semantics as for anneal, with the interval counted in
/// swap rounds.
RunRecord parallel_tempering(const std::vector<lattice::SpinConfiguration>& initials,
                             const lattice::InteractionKernel& kernel,
                             const TemperingConfig& config,
                             unsigned long long seed,
                             const std::function<bool(const TemperingState&)>& hook = {},
                             long long checkpoint_interval = 0,
                             const TemperingState* resume = nullptr);

} // namespace ghop::optimizer
