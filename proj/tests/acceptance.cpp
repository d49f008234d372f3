// End-to-end acceptance gate. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any criterion fails.
// argv[1] must be the path to the command-line binary (used by the
// determinism criterion).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ghop/analysis.hpp"
#include "ghop/analytic.hpp"
#include "ghop/io.hpp"
#include "ghop/lattice.hpp"
#include "ghop/optimizer.hpp"
#include "ghop/oracle.hpp"

using namespace ghop;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool ok,
            const std::string& detail)
{
    std::printf("criterion %2d (%s): %s%s%s\n", index, name.c_str(),
                ok ? "PASS" : "FAIL", detail.empty() ? "" : " -- ",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void run(int index, const std::string& name,
         const std::function<bool(std::string&)>& body)
{
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    report(index, name, ok, detail);
}

std::string fmt(double v) { return io::format_double(v); }

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// --- criterion bodies -----------------------------------------------------

bool closed_form_vs_monte_carlo(std::string& detail)
{
    struct Case {
        int dim;
        double d;
        unsigned long long seed;
    };
    const std::vector<Case> cases = {{2, 0.2, 101}, {2, 0.4, 102}, {2, 0.6, 103},
                                     {3, 0.2, 104}, {3, 0.5, 105}};
    double worst_sigma = 0.0;
    for (const auto& c : cases) {
        const ProblemSpec spec(c.dim, c.d);
        const double r0 = spec.unit_radius;
        const auto lawn = [&](const std::vector<double>& x) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return r2 <= r0 * r0;
        };
        oracle::BoundingBox box;
        box.lo.assign(c.dim, -r0);
        box.hi.assign(c.dim, r0);
        const auto mc =
            oracle::mc_pair_probability(lawn, box, spec, 10'000'000, c.seed);
        const double exact = c.dim == 2 ? analytic::disk_probability(spec)
                                        : analytic::ball_probability(spec);
        worst_sigma =
            std::max(worst_sigma, std::abs(mc.value - exact) / mc.standard_error);
    }
    detail = "worst deviation " + fmt(worst_sigma) + " sigma over 5 cases (limit 3)";
    return worst_sigma <= 3.0;
}

bool disk_stability_zeros(std::string& detail)
{
    const double at_marginal =
        std::abs(analytic::disk_stability(2, ProblemSpec(2, std::sqrt(3.0 / M_PI))));
    if (at_marginal > 1e-10) {
        detail = "mode-2 coefficient at sqrt(3/pi) is " + fmt(at_marginal);
        return false;
    }
    for (int n = 2; n <= 50; ++n) {
        const double d0 = analytic::disk_first_zero(n);
        const double residual = std::abs(analytic::disk_stability(n, ProblemSpec(2, d0)));
        const double below = analytic::disk_stability(n, ProblemSpec(2, 0.97 * d0));
        const double above = analytic::disk_stability(n, ProblemSpec(2, 1.03 * d0));
        if (residual > 1e-9 || !(below < 0.0) || !(above > 0.0)) {
            detail = "root check failed at n=" + std::to_string(n);
            return false;
        }
    }
    // Large-n law: the exact zero sits at the mode count n+1, so
    // d0 * (n+1) -> 2 sqrt(pi) with an O(1/n^2) correction.
    const double d0 = analytic::disk_first_zero(100);
    const double target = 2.0 * std::sqrt(M_PI);
    const double err = std::abs(d0 * 101.0 - target) / target;
    detail = "zeros verified for n in [2,50]; large-n deviation " + fmt(err) +
             " at n=100 (limit 0.01)";
    return err <= 0.01;
}

bool halfspace_structure(std::string& detail)
{
    const double d = 1.0;
    for (int dim : {3, 4, 6}) {
        const ProblemSpec spec(dim, d);
        for (int i = 1; i <= 10'000; ++i) {
            const double kd = 50.0 * i / 10'000;
            if (!(analytic::halfspace_stability(kd / d, spec) < -1e-12)) {
                detail = "nonnegative coefficient at N=" + std::to_string(dim) +
                         ", kd=" + fmt(kd);
                return false;
            }
        }
    }
    const ProblemSpec s2(2, d);
    double worst = 0.0;
    for (int m : {1, 2, 3})
        worst = std::max(
            worst, std::abs(analytic::halfspace_stability(2.0 * M_PI * m / d, s2)));
    detail = "N in {3,4,6} strictly negative on (0,50]; worst N=2 zero residual " +
             fmt(worst) + " (limit 1e-10)";
    return worst <= 1e-10;
}

bool halfspace_oracle(std::string& detail)
{
    double worst = 0.0;
    for (int dim : {2, 3, 4}) {
        const ProblemSpec spec(dim, 1.0);
        for (int i = 1; i <= 10; ++i) {
            const double kd = 12.0 * i / 10;
            worst = std::max(worst,
                             std::abs(oracle::halfspace_stability_numeric(kd, spec) -
                                      analytic::halfspace_stability(kd, spec)));
        }
    }
    detail = "worst |numeric - closed| " + fmt(worst) + " over 30 points (limit 1e-6)";
    return worst <= 1e-6;
}

bool perturbation_convergence(std::string& detail)
{
    const ProblemSpec spec(2, 0.98);
    const double p0 = analytic::disk_probability(spec);
    const double exact = analytic::disk_stability(2, spec);
    std::vector<double> errors;
    for (double eps : {1e-2, 3e-3, 1e-3}) {
        const double p = oracle::perturbed_disk_probability(
            oracle::PerturbedDiskSpec(2, eps).curve(), spec);
        errors.push_back(std::abs((p - p0) / (eps * eps) - exact) / std::abs(exact));
    }
    detail = "relative error at eps=1e-3 is " + fmt(errors.back()) + " (limit 0.02)";
    return errors.back() <= 0.02 && errors.back() <= errors.front();
}

bool finite_mode_limit(std::string& detail)
{
    const int n = 200;
    const double k = std::sqrt(M_PI) * n;  // mode n on the unit-area circle
    double max_amp = 0.0, worst = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const double kd = 4.0 * M_PI * i / 400;
        max_amp = std::max(max_amp, std::abs((std::cos(kd) - 1.0) / (2.0 * M_PI)));
    }
    for (int i = 1; i <= 400; ++i) {
        const double kd = 4.0 * M_PI * i / 400;
        const double d = kd / k;
        const double scaled =
            d * analytic::disk_stability(n, ProblemSpec(2, d)) /
            (2.0 * std::sqrt(M_PI));
        const double half = (std::cos(kd) - 1.0) / (2.0 * M_PI);
        worst = std::max(worst, std::abs(scaled - half));
    }
    for (int m : {1, 2}) {
        const double d = 2.0 * M_PI * m / k;
        if (!(analytic::disk_stability(n, ProblemSpec(2, d)) > 0.0)) {
            detail = "not above the limit curve at zero " + std::to_string(m);
            return false;
        }
    }
    detail = "worst deviation " + fmt(worst / max_amp) +
             " of the curve amplitude (limit 0.05); above the curve at its zeros";
    return worst <= 0.05 * max_amp;
}

bool mode_tables(std::string& detail)
{
    const auto top1 = analytic::most_unstable_modes(0.40, 18);
    const auto top2 = analytic::most_unstable_modes(0.46, 18);
    const auto pair = [](const std::vector<std::pair<int, double>>& t, int a, int b) {
        return (t[0].first == a && t[1].first == b) ||
               (t[0].first == b && t[1].first == a);
    };
    detail = "d=0.40 top modes {" + std::to_string(top1[0].first) + "," +
             std::to_string(top1[1].first) + "}, d=0.46 top modes {" +
             std::to_string(top2[0].first) + "," + std::to_string(top2[1].first) +
             "}";
    return pair(top1, 9, 17) && pair(top2, 7, 15);
}

bool discretization_study(std::string& detail)
{
    double worst = 0.0;
    for (double d : {0.2, 0.5}) {
        const auto rows = analysis::discretization_report(
            lattice::ShapeSpec::ball(), ProblemSpec(3, d), {40'000});
        worst = std::max(worst, rows[0].relative_deviation);
    }
    const auto rows = analysis::discretization_report(
        lattice::ShapeSpec::ball(), ProblemSpec(3, 0.5), {5'000, 20'000, 80'000});
    const bool decreasing =
        rows[0].relative_deviation > rows[1].relative_deviation &&
        rows[1].relative_deviation > rows[2].relative_deviation;
    detail = "worst deviation " + fmt(worst) + " at M=40000 (limit 0.01); " +
             (decreasing ? "strictly decreasing over M in {5k,20k,80k}"
                         : "NOT decreasing over M");
    return worst <= 0.01 && decreasing;
}

bool incremental_integrity(std::string& detail)
{
    double worst = 0.0;
    struct Case {
        int dim;
        double d;
        long long cells;
        int trials;
    };
    for (const auto& c : std::vector<Case>{{2, 0.4, 2'000, 600}, {3, 0.5, 4'000, 400}}) {
        const ProblemSpec spec(c.dim, c.d);
        const auto lat = lattice::make_lattice(c.dim, c.d, c.cells,
                                               1.3 * spec.unit_radius);
        const auto kernel = lattice::build_kernel(lat, spec, c.cells);
        auto config =
            lattice::init_shape(lat, c.cells, lattice::ShapeSpec::random_blob(7));
        std::mt19937_64 rng(987);
        std::uniform_int_distribution<long long> pick(0, c.cells - 1);
        std::uniform_int_distribution<long long> cell(0, lat.cell_count() - 1);
        double p = lattice::total_probability_serial(config, kernel);
        for (int trial = 0; trial < c.trials; ++trial) {
            const long long from = config.occupied[pick(rng)];
            long long to;
            do {
                to = cell(rng);
            } while (config.is_occupied(to) || !lat.in_interior(lat.unpack(to)));
            const double delta = lattice::move_delta(config, kernel, from, to);
            config.move(from, to);
            const double p2 = lattice::total_probability_serial(config, kernel);
            worst = std::max(worst, std::abs((p + delta) - p2) /
                                        std::max(1.0, std::abs(p2)));
            p = p2;
        }
    }
    detail = "worst relative mismatch " + fmt(worst) +
             " over 1000 moves (limit 1e-12)";
    return worst <= 1e-12;
}

double min_occupied_radius(const lattice::SpinConfiguration& config)
{
    std::array<double, 3> centroid = {0.0, 0.0, 0.0};
    for (long long idx : config.occupied) {
        const auto c = config.lattice.center(idx);
        for (int a = 0; a < 3; ++a) centroid[a] += c[a];
    }
    for (int a = 0; a < 3; ++a) centroid[a] /= config.occupied_count();
    double best = 1e300;
    for (long long idx : config.occupied) {
        const auto c = config.lattice.center(idx);
        double r2 = 0.0;
        for (int a = 0; a < config.lattice.dimension; ++a)
            r2 += (c[a] - centroid[a]) * (c[a] - centroid[a]);
        best = std::min(best, std::sqrt(r2));
    }
    return best;
}

bool optimizer_cogwheel(std::string& detail)
{
    const long long m = 10'000;
    const double d = 0.4;
    const ProblemSpec spec(2, d);
    const auto lat = lattice::make_lattice(2, d, m);
    const auto kernel = lattice::build_kernel(lat, spec, m);
    const auto initial = lattice::init_shape(lat, m, lattice::ShapeSpec::ball());
    // Gentle start: hot enough for the boundary instability to grow teeth,
    // cold enough not to melt the disk into a neighboring-mode basin.
    optimizer::AnnealSchedule schedule{3e-6, 5e-9, 2, 0.985, 1'000'000};
    const auto record = optimizer::anneal(initial, kernel, schedule, 1);

    const double exact = analytic::disk_probability(spec);
    const auto spectrum = analysis::cog_spectrum(record.best_configuration);
    detail = "best P " + fmt(record.best_probability) + " vs disk " + fmt(exact) +
             "; dominant mode " + std::to_string(spectrum.dominant_mode);
    return record.best_probability > exact &&
           (spectrum.dominant_mode == 9 || spectrum.dominant_mode == 17);
}

bool optimizer_ball_regime(std::string& detail)
{
    const long long m = 40'000;
    const double d = 0.64 * unit_ball_radius(3);
    const ProblemSpec spec(3, d);
    const auto lat = lattice::make_lattice(3, d, m);
    const auto kernel = lattice::build_kernel(lat, spec, m);
    const auto initial = lattice::init_shape(lat, m, lattice::ShapeSpec::ball());
    auto schedule = optimizer::default_schedule(initial, kernel, 31);
    schedule.t_start *= 0.05;  // equilibrate near the optimum, don't melt it
    schedule.t_end = 1e-3 * schedule.t_start;
    schedule.cooling_factor = 0.9;
    const auto record = optimizer::anneal(initial, kernel, schedule, 31);

    const auto& best = record.best_configuration;
    const double h = best.lattice.cell_size;
    const auto hist = analysis::radial_histogram(best, 64);
    const bool isotropic = analysis::is_isotropic(hist, {unit_ball_radius(3)}, 2.0 * h);
    const bool connected = analysis::connected_components(best).size() == 1;
    detail = std::string("radial-histogram verdict: ") +
             (isotropic ? "isotropic ball" : "NOT isotropic") + ", " +
             (connected ? "connected" : "disconnected");
    return isotropic && connected;
}

bool optimizer_shell_regime(std::string& detail)
{
    const double r0 = unit_ball_radius(3);

    // (c) quantitative shell at d = 1.25 R0, M = 40k, annealed from a
    // deliberately wrong inner radius.
    const long long m = 40'000;
    const double d = 1.25 * r0;
    const ProblemSpec spec(3, d);
    const auto [rho_star, p_star] = oracle::optimal_shell_radius(d);
    const oracle::ShellSpec target(rho_star);
    const double hint = target.outer_radius + 2.0 * rho_star;
    const auto lat = lattice::make_lattice(3, d, m, hint);
    const auto kernel = lattice::build_kernel(lat, spec, m);
    const auto initial =
        lattice::init_shape(lat, m, lattice::ShapeSpec::shell(d - r0));
    auto schedule = optimizer::default_schedule(initial, kernel, 57);
    schedule.t_start *= 0.3;
    schedule.t_end = 1e-3 * schedule.t_start;
    schedule.cooling_factor = 0.93;
    const auto record = optimizer::anneal(initial, kernel, schedule, 57);
    const double h = lat.cell_size;
    const double inner = min_occupied_radius(record.best_configuration);
    const double inner_err = std::abs(inner - rho_star);
    if (inner_err > 2.0 * h) {
        detail = "inner radius " + fmt(inner) + " vs optimal " + fmt(rho_star) +
                 " (off by " + fmt(inner_err / h) + " h, limit 2h)";
        return false;
    }

    // Coarse regime sequence at small M: ball -> shell -> anisotropic or
    // disconnected.
    const long long ms = 8'000;
    std::vector<std::string> sequence;
    for (double factor : {0.8, 1.25, 2.2}) {
        const double dj = factor * r0;
        const ProblemSpec sp(3, dj);
        const double sh = std::max(
            oracle::ShellSpec(oracle::optimal_shell_radius(std::max(dj, 1.01 * r0))
                                  .first)
                    .outer_radius +
                dj,
            1.5 * r0);
        const auto ls = lattice::make_lattice(3, dj, ms, sh);
        const auto ks = lattice::build_kernel(ls, sp, ms);
        // Unbiased start: a random blob, so every regime has to self-assemble.
        const auto init =
            lattice::init_shape(ls, ms, lattice::ShapeSpec::random_blob(4));
        auto sched = optimizer::default_schedule(init, ks, 71);
        sched.cooling_factor = 0.95;
        const auto rec = optimizer::anneal(init, ks, sched, 71);
        const auto& best = rec.best_configuration;
        const double hs = ls.cell_size;
        if (analysis::connected_components(best).size() > 1) {
            sequence.push_back("disconnected");
        } else if (min_occupied_radius(best) > 2.0 * hs) {
            sequence.push_back("shell");
        } else if (analysis::is_isotropic(analysis::radial_histogram(best, 64),
                                          {r0}, 2.0 * hs)) {
            sequence.push_back("ball");
        } else {
            sequence.push_back("anisotropic");
        }
    }
    detail = "inner radius off by " + fmt(inner_err / h) +
             " h (limit 2); regime sequence " + sequence[0] + " -> " +
             sequence[1] + " -> " + sequence[2];
    return sequence[0] == "ball" && sequence[1] == "shell" &&
           (sequence[2] == "anisotropic" || sequence[2] == "disconnected");
}

bool two_mode_additivity(std::string& detail)
{
    const ProblemSpec spec(2, 0.6);
    const double p0 = analytic::disk_probability(spec);
    double worst = 0.0;
    for (const auto& [n, m] : std::vector<std::pair<int, int>>{{2, 5}, {3, 7}}) {
        const double e1 = 2e-3, e2 = 2e-3;
        const double p = oracle::perturbed_disk_probability(
            oracle::multi_mode_disk({{n, e1}, {m, e2}}), spec);
        const double predicted = e1 * e1 * analytic::disk_stability(n, spec) +
                                 e2 * e2 * analytic::disk_stability(m, spec);
        worst = std::max(worst, std::abs((p - p0) - predicted) / std::abs(predicted));
    }
    detail = "worst relative deviation " + fmt(worst) + " (limit 0.05)";
    return worst <= 0.05;
}

bool determinism(std::string& detail, const std::string& cli)
{
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "ghop_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    const std::string solve_cfg = (base / "solve.json").string();
    io::atomic_write(solve_cfg, std::string(R"({
  "mode": "anneal", "dimension": 2, "d": 0.4, "M": 2000,
  "shape": {"kind": "random_blob", "seed": 17},
  "schedule": {"max_sweeps": 50, "cooling_factor": 0.85},
  "seed": 40, "output_prefix": "det", "checkpoint_interval": 10
})") + "\n");
    const std::string sweep_cfg = (base / "sweep.json").string();
    io::atomic_write(sweep_cfg, std::string(R"({
  "mode": "anneal", "dimension": 2, "d_grid": [0.3, 0.45], "M": 1000,
  "shape": {"kind": "ball"},
  "schedule": {"max_sweeps": 40, "cooling_factor": 0.85},
  "seed": 41, "output_prefix": "grid", "checkpoint_interval": 0
})") + "\n");

    const auto shell = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    for (const auto& [dir, threads] :
         std::vector<std::pair<std::string, std::string>>{{"a", "1"}, {"b", "4"}}) {
        const std::string out = (base / dir).string();
        if (!shell("--threads " + threads + " solve --config " + solve_cfg +
                   " --output " + out) ||
            !shell("--threads " + threads + " sweep --config " + sweep_cfg +
                   " --output " + out)) {
            detail = "command failed in " + out;
            return false;
        }
    }
    // Rerun in place: resumes from the finished checkpoint, must not change
    // any primary output.
    if (!shell("solve --config " + solve_cfg + " --output " + (base / "a").string())) {
        detail = "rerun failed";
        return false;
    }
    for (const std::string name : {"det.json", "det.dump", "grid.csv",
                                   "grid_point0_record.json", "grid_point1.dump"}) {
        const auto a = slurp((base / "a" / name).string());
        const auto b = slurp((base / "b" / name).string());
        if (a.empty() || a != b) {
            detail = "output differs or is missing: " + name;
            return false;
        }
    }
    detail = "solve and sweep outputs byte-identical across reruns and --threads";
    return true;
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli-binary>\n");
        return 2;
    }
    const std::string cli = argv[1];

    run(1, "closed forms vs Monte-Carlo", closed_form_vs_monte_carlo);
    run(2, "disk stability zeros", disk_stability_zeros);
    run(3, "half-space sign structure", halfspace_structure);
    run(4, "half-space numeric oracle", halfspace_oracle);
    run(5, "perturbation coefficient convergence", perturbation_convergence);
    run(6, "finite-mode limit curve", finite_mode_limit);
    run(7, "most-unstable mode tables", mode_tables);
    run(8, "discretization convergence", discretization_study);
    run(9, "incremental-update integrity", incremental_integrity);
    run(10, "optimizer regimes (cogwheel, ball, shell)", [&](std::string& detail) {
        std::string da, db, dc;
        const bool a = optimizer_cogwheel(da);
        const bool b = optimizer_ball_regime(db);
        const bool c = optimizer_shell_regime(dc);
        detail = "[2D] " + da + " | [3D ball] " + db + " | [3D shell] " + dc;
        return a && b && c;
    });
    run(11, "two-mode additivity", two_mode_additivity);
    run(12, "byte-identical determinism",
        [&](std::string& detail) { return determinism(detail, cli); });

    std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASSED"
                                      : "SOME CRITERIA FAILED");
    return failures == 0 ? 0 : 1;
}
