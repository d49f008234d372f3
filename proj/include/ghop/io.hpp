#pragma once

// Serialization: configuration dumps (JSON header + one index line per
// occupied cell), run records, annealing checkpoints, and 17-significant-
// digit CSV tables. All writes go through a temp-file + rename so partially
// written files are never observed.

#include <string>
#include <vector>

#include "ghop/lattice.hpp"
#include "ghop/optimizer.hpp"

namespace ghop::io {

/// Writes content to path atomically (temp file in the same directory,
/// then rename).
void atomic_write(const std::string& path, const std::string& content);

/// Shortest 17-significant-digit decimal form; round-trips a double exactly.
std::string format_double(double value);

/// CSV with a fixed column order and format_double cells.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

struct StoredConfiguration {
    lattice::SpinConfiguration config;
    double jump = 0.0;
    unsigned long long seed = 0;
    double probability = 0.0;
};

/// Dump format: first line a JSON header {dimension, d, h, M, extents,
/// origin, margin, seed, probability}, then one line of space-separated
/// per-axis cell indices per occupied cell, in list order.
void save_configuration(const std::string& path,
                        const lattice::SpinConfiguration& config, double jump,
                        unsigned long long seed, double probability);

/// Parses a dump written by save_configuration; throws std::runtime_error
/// on malformed input.
StoredConfiguration load_configuration(const std::string& path);

/// Run record: metadata and traces as JSON at json_path, plus the best
/// configuration as a dump at dump_path.
void save_run_record(const std::string& json_path, const std::string& dump_path,
                     const optimizer::RunRecord& record, double jump);

/// Full annealing snapshot, including the serialized RNG stream, so a run
/// can resume bit-exactly.
void save_checkpoint(const std::string& path, const optimizer::AnnealState& state,
                     double jump, unsigned long long seed);

struct StoredCheckpoint {
    optimizer::AnnealState state;
    double jump = 0.0;
    unsigned long long seed = 0;
};

StoredCheckpoint load_checkpoint(const std::string& path);

/// Tempering analogue of save_checkpoint/load_checkpoint.
void save_tempering_checkpoint(const std::string& path,
                               const optimizer::TemperingState& state, double jump,
                               unsigned long long seed);

struct StoredTemperingCheckpoint {
    optimizer::TemperingState state;
    double jump = 0.0;
    unsigned long long seed = 0;
};

StoredTemperingCheckpoint load_tempering_checkpoint(const std::string& path);

} // namespace ghop::io
