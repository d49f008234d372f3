// Command-line surface: closed-form evaluation and stability tables,
// oracle-vs-closed-form verification, annealing/tempering runs driven by a
// JSON config file, d-grid sweeps with regime labels, and analysis of
// stored configuration dumps.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error,
// 130 interrupted (checkpoint written).

#include <algorithm>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "ghop/analysis.hpp"
#include "ghop/analytic.hpp"
#include "ghop/io.hpp"
#include "ghop/lattice.hpp"
#include "ghop/optimizer.hpp"
#include "ghop/oracle.hpp"

using nlohmann::json;
using namespace ghop;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void handle_interrupt(int) { g_interrupted = 1; }

std::string fmt(double v) { return io::format_double(v); }

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- config-file plumbing -------------------------------------------------

json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& context)
{
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw UsageError("unknown key \"" + key + "\" in " + context);
    }
}

template <typename T>
T require_key(const json& j, const std::string& key, const std::string& context)
{
    if (!j.contains(key)) throw UsageError("missing key \"" + key + "\" in " + context);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError("bad value for \"" + key + "\" in " + context);
    }
}

lattice::ShapeSpec parse_shape(const json& j)
{
    if (!j.is_object()) throw UsageError("\"shape\" must be an object");
    const auto kind = require_key<std::string>(j, "kind", "shape");
    if (kind == "ball") {
        reject_unknown_keys(j, {"kind"}, "shape");
        return lattice::ShapeSpec::ball();
    }
    if (kind == "shell") {
        reject_unknown_keys(j, {"kind", "rho"}, "shape");
        return lattice::ShapeSpec::shell(require_key<double>(j, "rho", "shape"));
    }
    if (kind == "cog") {
        reject_unknown_keys(j, {"kind", "n", "eps"}, "shape");
        return lattice::ShapeSpec::cog(require_key<int>(j, "n", "shape"),
                                       require_key<double>(j, "eps", "shape"));
    }
    if (kind == "random_blob") {
        reject_unknown_keys(j, {"kind", "seed"}, "shape");
        return lattice::ShapeSpec::random_blob(
            require_key<unsigned long long>(j, "seed", "shape"));
    }
    throw UsageError("shape kind must be ball, shell, cog, or random_blob");
}

struct RunConfig {
    std::string mode;  // "anneal" or "temper"
    int dimension = 2;
    double jump = 0.0;
    std::vector<double> jump_grid;  // sweeps only
    long long cells = 0;
    lattice::ShapeSpec shape = lattice::ShapeSpec::ball();
    bool has_schedule = false;
    json schedule;
    bool has_tempering = false;
    json tempering;
    unsigned long long seed = 0;
    std::string output_prefix = "run";
    long long checkpoint_interval = 10;
};

RunConfig parse_run_config(const json& j, bool sweep)
{
    reject_unknown_keys(j,
                        {"mode", "dimension", "d", "d_grid", "M", "shape", "schedule",
                         "tempering", "seed", "output_prefix",
                         "checkpoint_interval"},
                        "config");
    RunConfig cfg;
    cfg.mode = require_key<std::string>(j, "mode", "config");
    if (cfg.mode != "anneal" && cfg.mode != "temper")
        throw UsageError("mode must be \"anneal\" or \"temper\"");
    cfg.dimension = require_key<int>(j, "dimension", "config");
    if (cfg.dimension != 2 && cfg.dimension != 3)
        throw UsageError("dimension must be 2 or 3");
    if (sweep) {
        cfg.jump_grid = require_key<std::vector<double>>(j, "d_grid", "config");
        if (j.contains("d")) throw UsageError("sweep configs use \"d_grid\", not \"d\"");
    } else {
        cfg.jump = require_key<double>(j, "d", "config");
        if (j.contains("d_grid"))
            throw UsageError("solve configs use \"d\", not \"d_grid\"");
        if (!(cfg.jump > 0.0)) throw UsageError("d must be positive");
    }
    cfg.cells = require_key<long long>(j, "M", "config");
    if (cfg.cells < 2) throw UsageError("M must be at least 2");
    cfg.shape = parse_shape(j.at("shape"));
    if (j.contains("schedule")) {
        cfg.has_schedule = true;
        cfg.schedule = j.at("schedule");
        reject_unknown_keys(cfg.schedule,
                            {"t_start", "t_end", "steps_per_temperature",
                             "cooling_factor", "max_sweeps"},
                            "schedule");
    }
    if (j.contains("tempering")) {
        cfg.has_tempering = true;
        cfg.tempering = j.at("tempering");
        reject_unknown_keys(cfg.tempering,
                            {"temperatures", "swap_interval", "rounds"}, "tempering");
    }
    if (cfg.mode == "temper" && !cfg.has_tempering)
        throw UsageError("temper mode requires a \"tempering\" block");
    if (cfg.mode == "anneal" && cfg.has_tempering)
        throw UsageError("anneal mode does not take a \"tempering\" block");
    cfg.seed = require_key<unsigned long long>(j, "seed", "config");
    if (j.contains("output_prefix"))
        cfg.output_prefix = require_key<std::string>(j, "output_prefix", "config");
    if (j.contains("checkpoint_interval"))
        cfg.checkpoint_interval =
            require_key<long long>(j, "checkpoint_interval", "config");
    return cfg;
}

std::string output_dir(const std::string& flag_value)
{
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("GRASSHOPPER_OUTPUT_DIR")) return env;
    return ".";
}

std::string join_path(const std::string& dir, const std::string& name)
{
    return (std::filesystem::path(dir) / name).string();
}

// --- shared run machinery -------------------------------------------------

optimizer::AnnealSchedule build_schedule(const RunConfig& cfg,
                                         const lattice::SpinConfiguration& initial,
                                         const lattice::InteractionKernel& kernel)
{
    auto schedule = optimizer::default_schedule(initial, kernel, cfg.seed);
    if (cfg.has_schedule) {
        const auto& s = cfg.schedule;
        if (s.contains("t_start")) schedule.t_start = s.at("t_start").get<double>();
        if (s.contains("t_end")) schedule.t_end = s.at("t_end").get<double>();
        if (s.contains("steps_per_temperature"))
            schedule.steps_per_temperature =
                s.at("steps_per_temperature").get<long long>();
        if (s.contains("cooling_factor"))
            schedule.cooling_factor = s.at("cooling_factor").get<double>();
        if (s.contains("max_sweeps"))
            schedule.max_sweeps = s.at("max_sweeps").get<long long>();
    }
    schedule.validate();
    return schedule;
}

optimizer::TemperingConfig build_tempering(const RunConfig& cfg)
{
    optimizer::TemperingConfig t;
    t.temperatures =
        require_key<std::vector<double>>(cfg.tempering, "temperatures", "tempering");
    if (cfg.tempering.contains("swap_interval"))
        t.swap_interval = cfg.tempering.at("swap_interval").get<long long>();
    if (cfg.tempering.contains("rounds"))
        t.rounds = cfg.tempering.at("rounds").get<long long>();
    t.validate();
    return t;
}

struct RunOutcome {
    optimizer::RunRecord record;
    bool interrupted = false;
};

RunOutcome execute_run(const RunConfig& cfg, double jump,
                       const std::string& checkpoint_path)
{
    const ProblemSpec spec(cfg.dimension, jump);
    double hint = lattice::shape_extent(cfg.shape, cfg.dimension);
    if (cfg.dimension == 3) {
        // Leave room for shells to grow past the initial shape.
        const auto [rho, p] = oracle::optimal_shell_radius(
            std::max(jump, 1.01 * unit_ball_radius(3)));
        hint = std::max(hint, oracle::ShellSpec(rho).outer_radius + 2.0 * rho);
    }
    const auto lat = lattice::make_lattice(cfg.dimension, jump, cfg.cells, hint);
    const auto kernel = lattice::build_kernel(lat, spec, cfg.cells);
    const auto initial = lattice::init_shape(lat, cfg.cells, cfg.shape);

    RunOutcome outcome;
    if (cfg.mode == "anneal") {
        const auto schedule = build_schedule(cfg, initial, kernel);
        optimizer::AnnealState resume_state;
        const optimizer::AnnealState* resume = nullptr;
        if (!checkpoint_path.empty() &&
            std::filesystem::exists(checkpoint_path)) {
            auto stored = io::load_checkpoint(checkpoint_path);
            if (stored.jump == jump && stored.seed == cfg.seed) {
                resume_state = std::move(stored.state);
                resume = &resume_state;
            }
        }
        const auto hook = [&](const optimizer::AnnealState& state) {
            if (!checkpoint_path.empty())
                io::save_checkpoint(checkpoint_path, state, jump, cfg.seed);
            return g_interrupted == 0;
        };
        outcome.record =
            optimizer::anneal(initial, kernel, schedule, cfg.seed, hook,
                              cfg.checkpoint_interval, resume);
    } else {
        const auto tempering = build_tempering(cfg);
        std::vector<lattice::SpinConfiguration> initials(
            tempering.temperatures.size(), initial);
        optimizer::TemperingState resume_state;
        const optimizer::TemperingState* resume = nullptr;
        if (!checkpoint_path.empty() &&
            std::filesystem::exists(checkpoint_path)) {
            auto stored = io::load_tempering_checkpoint(checkpoint_path);
            if (stored.jump == jump && stored.seed == cfg.seed) {
                resume_state = std::move(stored.state);
                resume = &resume_state;
            }
        }
        const auto hook = [&](const optimizer::TemperingState& state) {
            if (!checkpoint_path.empty())
                io::save_tempering_checkpoint(checkpoint_path, state, jump,
                                              cfg.seed);
            return g_interrupted == 0;
        };
        outcome.record =
            optimizer::parallel_tempering(initials, kernel, tempering, cfg.seed,
                                          hook, cfg.checkpoint_interval, resume);
    }
    outcome.interrupted = outcome.record.interrupted;
    return outcome;
}

// Regime label for a finished configuration.
std::string classify(const lattice::SpinConfiguration& config, double jump,
                     int& dominant_mode)
{
    dominant_mode = 0;
    const auto components = analysis::connected_components(config);
    if (components.size() > 1) return "disconnected";
    const double h = config.lattice.cell_size;
    if (config.lattice.dimension == 2) {
        try {
            const auto spectrum = analysis::cog_spectrum(config);
            if (spectrum.dominant_amplitude <= 2.0 * h) return "disk";
            dominant_mode = spectrum.dominant_mode;
            return "cog" + std::to_string(spectrum.dominant_mode);
        } catch (const std::runtime_error&) {
            return "anisotropic";
        }
    }
    const auto report = analysis::radial_histogram(config, 64);
    const double r0 = unit_ball_radius(3);
    if (analysis::is_isotropic(report, {r0}, h)) return "ball";
    const auto [rho, p] = oracle::optimal_shell_radius(
        std::max(jump, 1.01 * r0));
    const oracle::ShellSpec shell(rho);
    if (analysis::is_isotropic(report, {shell.inner_radius, shell.outer_radius}, h))
        return "shell";
    return "anisotropic";
}

// --- analytic subcommand --------------------------------------------------

void emit_curve(const std::string& path, const analytic::StabilityCurve& curve,
                const std::string& xname)
{
    std::vector<std::vector<double>> rows;
    for (const auto& [x, y] : curve.samples) rows.push_back({x, y});
    io::write_csv(path, {xname, "delta_p"}, rows);
}

// --- verify helpers -------------------------------------------------------

int report_check(const std::string& name, double achieved, double tolerance)
{
    std::cout << name << ": deviation " << fmt(achieved) << " (tolerance "
              << fmt(tolerance) << ")\n";
    if (achieved <= tolerance) {
        std::cout << "OK\n";
        return 0;
    }
    std::cout << "FAILED: worst deviation " << fmt(achieved) << " exceeds "
              << fmt(tolerance) << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv)
{
    std::signal(SIGINT, handle_interrupt);

    CLI::App app{"Lawn-shape toolkit: closed forms, stability spectra, "
                 "discrete shape optimization, and configuration analysis"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "bound the worker thread count (results do not depend on it)");

    // ---- analytic ----
    auto* cmd_analytic = app.add_subcommand("analytic", "closed-form values");
    cmd_analytic->require_subcommand(1);
    struct {
        double d = 0.0, kd = 1.0;
        int dim = 3, n = 2, nmax = 18, points = 200;
        double lo = 0.0, hi = 0.0;
        std::string curve;
    } an;
    auto* an_disk = cmd_analytic->add_subcommand("disk", "2D disk probability");
    an_disk->add_option("--d", an.d, "jump distance")->required();
    auto* an_ball = cmd_analytic->add_subcommand("ball", "3D ball probability");
    an_ball->add_option("--d", an.d, "jump distance")->required();
    auto* an_half = cmd_analytic->add_subcommand("halfspace",
                                                 "plane-wave stability coefficient");
    an_half->add_option("--N", an.dim, "dimension >= 2");
    an_half->add_option("--kd", an.kd, "dimensionless wavenumber k*d");
    an_half->add_option("--d", an.d, "jump distance (default 1)");
    an_half->add_option("--curve", an.curve, "write a kd,delta_p CSV");
    an_half->add_option("--points", an.points, "curve sample count");
    an_half->add_option("--max", an.hi, "curve upper kd limit");
    auto* an_mode = cmd_analytic->add_subcommand("diskmode",
                                                 "disk mode-n stability coefficient");
    an_mode->add_option("--n", an.n, "mode number >= 2")->required();
    an_mode->add_option("--d", an.d, "jump distance");
    an_mode->add_option("--curve", an.curve, "write a d,delta_p CSV");
    an_mode->add_option("--points", an.points, "curve sample count");
    auto* an_zero = cmd_analytic->add_subcommand("firstzero",
                                                 "first marginal d of mode n");
    an_zero->add_option("--n", an.n, "mode number >= 2")->required();
    auto* an_modes = cmd_analytic->add_subcommand("modes",
                                                  "modes ranked by instability");
    an_modes->add_option("--d", an.d, "jump distance")->required();
    an_modes->add_option("--nmax", an.nmax, "largest mode to consider");

    // ---- solve / sweep ----
    std::string config_path, out_flag, checkpoint_flag;
    auto* cmd_solve = app.add_subcommand("solve", "run one optimization");
    cmd_solve->add_option("--config", config_path, "run config JSON")->required();
    cmd_solve->add_option("--output", out_flag, "output directory");
    auto* cmd_sweep = app.add_subcommand("sweep", "optimize over a d grid");
    cmd_sweep->add_option("--config", config_path, "sweep config JSON")->required();
    cmd_sweep->add_option("--output", out_flag, "output directory");

    // ---- verify ----
    auto* cmd_verify = app.add_subcommand("verify", "oracle cross-checks");
    cmd_verify->require_subcommand(1);
    struct {
        double d = 0.5, kd = 1.0, eps = 1e-3, rho = -1.0, tol = -1.0;
        int dim = 3, n = 2;
        long long cells = 40'000, trials = 1'000;
    } vf;
    auto* vf_ball = cmd_verify->add_subcommand("ball", "rasterized ball vs closed form");
    vf_ball->add_option("--d", vf.d);
    vf_ball->add_option("--M", vf.cells);
    vf_ball->add_option("--N", vf.dim);
    vf_ball->add_option("--tol", vf.tol);
    auto* vf_shell = cmd_verify->add_subcommand("shell",
                                                "rasterized shell vs quadrature");
    vf_shell->add_option("--d", vf.d);
    vf_shell->add_option("--M", vf.cells);
    vf_shell->add_option("--rho", vf.rho, "inner radius (default optimal)");
    vf_shell->add_option("--tol", vf.tol);
    auto* vf_half = cmd_verify->add_subcommand("halfspace",
                                               "numeric integral vs closed form");
    vf_half->add_option("--N", vf.dim);
    vf_half->add_option("--kd", vf.kd);
    vf_half->add_option("--tol", vf.tol);
    auto* vf_pert = cmd_verify->add_subcommand("diskpert",
                                               "boundary integral vs coefficient");
    vf_pert->add_option("--n", vf.n);
    vf_pert->add_option("--d", vf.d);
    vf_pert->add_option("--eps", vf.eps);
    vf_pert->add_option("--tol", vf.tol);
    auto* vf_delta = cmd_verify->add_subcommand("delta",
                                                "incremental vs full recompute");
    vf_delta->add_option("--N", vf.dim);
    vf_delta->add_option("--d", vf.d);
    vf_delta->add_option("--M", vf.cells);
    vf_delta->add_option("--trials", vf.trials);
    vf_delta->add_option("--tol", vf.tol);

    // ---- analyze ----
    std::string input_path, json_out, csv_out;
    bool expect_shell = false;
    auto* cmd_analyze = app.add_subcommand("analyze", "inspect a configuration dump");
    cmd_analyze->add_option("--input", input_path, "configuration dump")->required();
    cmd_analyze->add_option("--json", json_out, "write the report as JSON");
    cmd_analyze->add_option("--csv", csv_out, "write the radial histogram as CSV");
    cmd_analyze->add_flag("--expect-shell", expect_shell,
                          "overlay analytic shell radii");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        // ---- analytic ----
        if (an_disk->parsed()) {
            std::cout << fmt(analytic::disk_probability(ProblemSpec(2, an.d))) << "\n";
            return 0;
        }
        if (an_ball->parsed()) {
            std::cout << fmt(analytic::ball_probability(ProblemSpec(3, an.d))) << "\n";
            return 0;
        }
        if (an_half->parsed()) {
            const double d = an.d > 0.0 ? an.d : 1.0;
            const ProblemSpec spec(an.dim, d);
            if (!an.curve.empty()) {
                const double hi = an.hi > 0.0 ? an.hi : 4.0 * M_PI;
                emit_curve(an.curve,
                           analytic::halfspace_curve(an.dim, d, hi, an.points),
                           "kd");
            }
            std::cout << fmt(analytic::halfspace_stability(an.kd / d, spec)) << "\n";
            return 0;
        }
        if (an_mode->parsed()) {
            if (!an.curve.empty())
                emit_curve(an.curve,
                           analytic::disk_curve(an.n,
                                                2.0 * unit_ball_radius(2) * 0.999,
                                                an.points),
                           "d");
            if (an.d > 0.0)
                std::cout << fmt(analytic::disk_stability(an.n, ProblemSpec(2, an.d)))
                          << "\n";
            return 0;
        }
        if (an_zero->parsed()) {
            std::cout << fmt(analytic::disk_first_zero(an.n)) << "\n";
            return 0;
        }
        if (an_modes->parsed()) {
            for (const auto& [n, coeff] : analytic::most_unstable_modes(an.d, an.nmax))
                std::cout << n << " " << fmt(coeff) << "\n";
            return 0;
        }

        // ---- solve ----
        if (cmd_solve->parsed()) {
            const auto cfg = parse_run_config(load_json_file(config_path), false);
            const std::string dir = output_dir(out_flag);
            std::filesystem::create_directories(dir);
            const std::string prefix = join_path(dir, cfg.output_prefix);
            const auto outcome =
                execute_run(cfg, cfg.jump, prefix + ".checkpoint.json");
            if (outcome.interrupted) {
                std::cerr << "interrupted; checkpoint written to " << prefix
                          << ".checkpoint.json\n";
                return 130;
            }
            io::save_run_record(prefix + ".json", prefix + ".dump", outcome.record,
                                cfg.jump);
            std::cout << "best_probability " << fmt(outcome.record.best_probability)
                      << "\n";
            int mode = 0;
            const std::string label =
                classify(outcome.record.best_configuration, cfg.jump, mode);
            std::cout << "regime " << label << "\n";
            if (cfg.dimension == 2 && mode > 0)
                std::cout << "dominant_mode " << mode << "\n";
            return 0;
        }

        // ---- sweep ----
        if (cmd_sweep->parsed()) {
            const auto cfg = parse_run_config(load_json_file(config_path), true);
            const std::string dir = output_dir(out_flag);
            std::filesystem::create_directories(dir);
            const std::string prefix = join_path(dir, cfg.output_prefix);

            std::ostringstream csv;
            csv << "d,best_probability,components,label\n";
            for (std::size_t i = 0; i < cfg.jump_grid.size(); ++i) {
                const double d = cfg.jump_grid[i];
                const std::string point =
                    prefix + "_point" + std::to_string(i) + ".json";
                json row;
                if (std::filesystem::exists(point)) {
                    row = load_json_file(point);
                    if (row.at("d").get<double>() != d)
                        throw UsageError("stale sweep point file: " + point);
                } else {
                    const auto outcome = execute_run(
                        cfg, d, prefix + "_point" + std::to_string(i) +
                                    ".checkpoint.json");
                    if (outcome.interrupted) {
                        std::cerr << "interrupted during point " << i << "\n";
                        return 130;
                    }
                    int mode = 0;
                    const auto& best = outcome.record.best_configuration;
                    row = json{{"d", d},
                               {"best_probability",
                                outcome.record.best_probability},
                               {"components",
                                analysis::connected_components(best).size()},
                               {"label", classify(best, d, mode)}};
                    io::save_run_record(
                        prefix + "_point" + std::to_string(i) + "_record.json",
                        prefix + "_point" + std::to_string(i) + ".dump",
                        outcome.record, d);
                    io::atomic_write(point, row.dump(2) + "\n");
                }
                csv << fmt(row.at("d").get<double>()) << ","
                    << fmt(row.at("best_probability").get<double>()) << ","
                    << row.at("components").get<long long>() << ","
                    << row.at("label").get<std::string>() << "\n";
            }
            io::atomic_write(prefix + ".csv", csv.str());
            std::cout << "wrote " << prefix << ".csv\n";
            return 0;
        }

        // ---- verify ----
        if (vf_ball->parsed()) {
            const ProblemSpec spec(vf.dim, vf.d);
            const auto rows = analysis::discretization_report(
                lattice::ShapeSpec::ball(), spec, {vf.cells});
            return report_check("ball discretization", rows[0].relative_deviation,
                                vf.tol > 0.0 ? vf.tol : 0.01);
        }
        if (vf_shell->parsed()) {
            const double d = vf.d;
            const double rho =
                vf.rho >= 0.0 ? vf.rho : oracle::optimal_shell_radius(d).first;
            const auto rows = analysis::discretization_report(
                lattice::ShapeSpec::shell(rho), ProblemSpec(3, d), {vf.cells});
            return report_check("shell discretization", rows[0].relative_deviation,
                                vf.tol > 0.0 ? vf.tol : 0.01);
        }
        if (vf_half->parsed()) {
            const ProblemSpec spec(vf.dim, 1.0);
            const double numeric = oracle::halfspace_stability_numeric(vf.kd, spec);
            const double closed = analytic::halfspace_stability(vf.kd, spec);
            return report_check("half-space integral", std::abs(numeric - closed),
                                vf.tol > 0.0 ? vf.tol : 1e-6);
        }
        if (vf_pert->parsed()) {
            const ProblemSpec spec(2, vf.d);
            const double p0 = analytic::disk_probability(spec);
            const double p = oracle::perturbed_disk_probability(
                oracle::PerturbedDiskSpec(vf.n, vf.eps).curve(), spec);
            const double exact = analytic::disk_stability(vf.n, spec);
            const double achieved =
                std::abs((p - p0) / (vf.eps * vf.eps) - exact) / std::abs(exact);
            return report_check("disk perturbation", achieved,
                                vf.tol > 0.0 ? vf.tol : 0.02);
        }
        if (vf_delta->parsed()) {
            const ProblemSpec spec(vf.dim, vf.d);
            const auto lat =
                lattice::make_lattice(vf.dim, vf.d, vf.cells,
                                      1.3 * unit_ball_radius(vf.dim));
            const auto kernel = lattice::build_kernel(lat, spec, vf.cells);
            auto config = lattice::init_shape(
                lat, vf.cells, lattice::ShapeSpec::random_blob(1));
            std::mt19937_64 rng(12345);
            std::uniform_int_distribution<long long> pick(0, vf.cells - 1);
            std::uniform_int_distribution<long long> cell(0, lat.cell_count() - 1);
            double p = lattice::total_probability(config, kernel);
            double worst = 0.0;
            for (long long trial = 0; trial < vf.trials; ++trial) {
                const long long from = config.occupied[pick(rng)];
                long long to;
                do {
                    to = cell(rng);
                } while (config.is_occupied(to) ||
                         !lat.in_interior(lat.unpack(to)));
                const double delta = lattice::move_delta(config, kernel, from, to);
                config.move(from, to);
                const double p2 = lattice::total_probability(config, kernel);
                worst = std::max(worst, std::abs((p + delta) - p2) /
                                            std::max(1.0, std::abs(p2)));
                p = p2;
            }
            return report_check("incremental update", worst,
                                vf.tol > 0.0 ? vf.tol : 1e-12);
        }

        // ---- analyze ----
        if (cmd_analyze->parsed()) {
            io::StoredConfiguration stored;
            try {
                stored = io::load_configuration(input_path);
            } catch (const std::runtime_error& e) {
                std::cerr << e.what() << "\n";
                return 2;
            }
            const auto& config = stored.config;
            const double h = config.lattice.cell_size;
            const auto components = analysis::connected_components(config);
            const auto report = analysis::radial_histogram(config, 64);

            json out{{"d", stored.jump},
                     {"M", config.occupied_count()},
                     {"h", h},
                     {"dimension", config.lattice.dimension},
                     {"probability", stored.probability},
                     {"components", components.size()},
                     {"boundary_cells", report.boundary.size()},
                     {"isotropy_threshold", 0.05}};
            int mode = 0;
            out["label"] = classify(config, stored.jump, mode);
            if (config.lattice.dimension == 2 && mode > 0)
                out["dominant_mode"] = mode;

            if (config.lattice.dimension == 3) {
                const double r0 = unit_ball_radius(3);
                out["ball_isotropic"] = analysis::is_isotropic(report, {r0}, h);
            }
            if (expect_shell) {
                const auto [rho, p] = oracle::optimal_shell_radius(stored.jump);
                const oracle::ShellSpec shell(rho);
                out["expected_inner_radius"] = shell.inner_radius;
                out["expected_outer_radius"] = shell.outer_radius;
                out["shell_isotropic"] = analysis::is_isotropic(
                    report, {shell.inner_radius, shell.outer_radius}, h);
                out["mass_outside_shell_windows"] = analysis::mass_outside_windows(
                    report, {shell.inner_radius, shell.outer_radius}, h);
            }
            if (!csv_out.empty()) {
                std::vector<std::vector<double>> rows;
                for (std::size_t b = 0; b < report.counts.size(); ++b)
                    rows.push_back({report.bin_edges[b], report.bin_edges[b + 1],
                                    static_cast<double>(report.counts[b])});
                io::write_csv(csv_out, {"r_lo", "r_hi", "count"}, rows);
            }
            if (!json_out.empty()) io::atomic_write(json_out, out.dump(2) + "\n");
            std::cout << out.dump(2) << "\n";
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
