#include "ghop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>

#include "ghop/analytic.hpp"

namespace ghop::oracle {

namespace {

// --- Gauss-Legendre nodes on [-1, 1], computed once per order ------------

struct GaussRule {
    std::vector<double> x, w;
};

GaussRule make_gauss(int n)
{
    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.x[i] = x;
        rule.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GaussRule& gauss20()
{
    static const GaussRule rule = make_gauss(20);
    return rule;
}

const GaussRule& gauss64()
{
    static const GaussRule rule = make_gauss(64);
    return rule;
}

template <typename F>
double gauss_integrate(const GaussRule& rule, double a, double b, const F& f)
{
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
        sum += rule.w[i] * f(mid + half * rule.x[i]);
    return sum * half;
}

// Composite Gauss with panel width <= max_panel.
template <typename F>
double gauss_composite(const GaussRule& rule, double a, double b, double max_panel,
                       const F& f)
{
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + (b - a) * p / panels;
        const double pb = a + (b - a) * (p + 1) / panels;
        sum += gauss_integrate(rule, pa, pb, f);
    }
    return sum;
}

// --- deterministic stream splitting --------------------------------------

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

// --- Monte Carlo ----------------------------------------------------------

McEstimate mc_pair_probability(const std::function<bool(const std::vector<double>&)>& lawn,
                               const BoundingBox& box, const ProblemSpec& spec,
                               long long samples, unsigned long long seed)
{
    const int dim = spec.dimension;
    if (static_cast<int>(box.lo.size()) != dim || static_cast<int>(box.hi.size()) != dim)
        throw std::invalid_argument("mc_pair_probability: box dimension mismatch");
    if (samples < 10000)
        throw std::invalid_argument("mc_pair_probability: need >= 1e4 samples");

    const int chunks = 1024;
    std::vector<long long> chunk_hits(chunks, 0);
    std::vector<long long> chunk_draws(chunks, 0);
    const long long per_chunk = (samples + chunks - 1) / chunks;
    const long long total = per_chunk * chunks;

    bool box_failure = false;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
        std::uint64_t state = seed;
        splitmix64(state);
        state ^= 0x51ab3f2c9d04e1f7ULL * (c + 1);
        std::mt19937_64 rng(splitmix64(state));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);

        std::vector<double> start(dim), landing(dim);
        long long hits = 0, draws = 0;
        for (long long s = 0; s < per_chunk && !box_failure; ++s) {
            // Rejection-sample the start point from the bounding box.
            long long local_draws = 0;
            bool found = false;
            while (!found) {
                for (int a = 0; a < dim; ++a)
                    start[a] = box.lo[a] + (box.hi[a] - box.lo[a]) * unif(rng);
                ++local_draws;
                found = lawn(start);
                if (!found && local_draws > 100000) {
                    box_failure = true;
                    break;
                }
            }
            if (!found) break;
            draws += local_draws;
            // Uniform direction on the (N-1)-sphere.
            double norm2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                landing[a] = gauss(rng);
                norm2 += landing[a] * landing[a];
            }
            const double scale = spec.jump / std::sqrt(norm2);
            for (int a = 0; a < dim; ++a) landing[a] = start[a] + landing[a] * scale;
            if (lawn(landing)) ++hits;
        }
        chunk_hits[c] = hits;
        chunk_draws[c] = draws;
    }

    if (box_failure)
        throw std::runtime_error(
            "mc_pair_probability: bounding-box rejection efficiency below 1e-3; "
            "supply a tighter box");
    long long hits = 0, draws = 0;
    for (int c = 0; c < chunks; ++c) {
        hits += chunk_hits[c];
        draws += chunk_draws[c];
    }
    McEstimate est;
    est.value = static_cast<double>(hits) / total;
    est.standard_error = std::sqrt(est.value * (1.0 - est.value) / total);
    est.box_efficiency = static_cast<double>(total) / draws;
    return est;
}

// --- parametric curves ----------------------------------------------------

void ParametricCurve2D::validate() const
{
    const int n = 720;
    for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * M_PI * i / n;
        if (!(radius(theta) > 0.0))
            throw std::runtime_error("ParametricCurve2D: radius must be positive");
    }
    if (std::abs(radius(0.0) - radius(2.0 * M_PI)) > 1e-12 ||
        std::abs(radius_deriv(0.0) - radius_deriv(2.0 * M_PI)) > 1e-12)
        throw std::runtime_error("ParametricCurve2D: curve not 2pi-periodic");
}

PerturbedDiskSpec::PerturbedDiskSpec(int n, double eps) : mode(n), amplitude(eps)
{
    if (n < 2) throw std::domain_error("PerturbedDiskSpec: mode must be >= 2");
    if (eps < 0.0) throw std::domain_error("PerturbedDiskSpec: amplitude must be >= 0");
    const double r02 = unit_ball_radius(2);
    area_radius = std::sqrt(r02 * r02 - 0.5 * eps * eps);
    if (!(eps < area_radius))
        throw std::domain_error("PerturbedDiskSpec: amplitude too large for a simple curve");
}

ParametricCurve2D PerturbedDiskSpec::curve() const
{
    const int n = mode;
    const double eps = amplitude, base = area_radius;
    ParametricCurve2D c;
    c.radius = [n, eps, base](double theta) { return base + eps * std::cos(n * theta); };
    c.radius_deriv = [n, eps](double theta) { return -eps * n * std::sin(n * theta); };
    return c;
}

ParametricCurve2D multi_mode_disk(const std::vector<std::pair<int, double>>& modes)
{
    const double r02 = unit_ball_radius(2);
    double eps2 = 0.0;
    for (const auto& [n, eps] : modes) {
        if (n < 2) throw std::domain_error("multi_mode_disk: modes must be >= 2");
        eps2 += eps * eps;
    }
    const double base = std::sqrt(r02 * r02 - 0.5 * eps2);
    ParametricCurve2D c;
    c.radius = [modes, base](double theta) {
        double r = base;
        for (const auto& [n, eps] : modes) r += eps * std::cos(n * theta);
        return r;
    };
    c.radius_deriv = [modes](double theta) {
        double dr = 0.0;
        for (const auto& [n, eps] : modes) dr -= eps * n * std::sin(n * theta);
        return dr;
    };
    return c;
}

// --- boundary double integral ---------------------------------------------

namespace {

struct CurvePoint {
    double r, dr, cos_t, sin_t;
};

inline double chord(const CurvePoint& a, const CurvePoint& b)
{
    const double x1 = a.r * a.cos_t, y1 = a.r * a.sin_t;
    const double x2 = b.r * b.cos_t, y2 = b.r * b.sin_t;
    const double dx = x1 - x2, dy = y1 - y2;
    return std::sqrt(dx * dx + dy * dy);
}

inline double tangent_dot(const CurvePoint& a, const CurvePoint& b)
{
    const double ax = a.dr * a.cos_t - a.r * a.sin_t;
    const double ay = a.dr * a.sin_t + a.r * a.cos_t;
    const double bx = b.dr * b.cos_t - b.r * b.sin_t;
    const double by = b.dr * b.sin_t + b.r * b.cos_t;
    return ax * bx + ay * by;
}

} // namespace

double perturbed_disk_probability(const ParametricCurve2D& curve,
                                  const ProblemSpec& spec)
{
    if (spec.dimension != 2)
        throw std::domain_error("perturbed_disk_probability: requires N = 2");
    curve.validate();
    const double d = spec.jump;

    auto point_at = [&curve](double theta) {
        CurvePoint p;
        p.r = curve.radius(theta);
        p.dr = curve.radius_deriv(theta);
        p.cos_t = std::cos(theta);
        p.sin_t = std::sin(theta);
        return p;
    };

    const int n_theta = 768;
    const int n_scan = 1024;
    const auto& rule = gauss20();

    double outer_sum = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double theta = 2.0 * M_PI * i / n_theta;
        const CurvePoint p1 = point_at(theta);

        auto gap = [&](double phi) { return chord(p1, point_at(theta + phi)) - d; };

        // Locate the chord-kink angles where the separation crosses d.
        std::vector<double> cuts;
        double prev_phi = -M_PI, prev_g = gap(prev_phi);
        for (int s = 1; s <= n_scan; ++s) {
            const double phi = -M_PI + 2.0 * M_PI * s / n_scan;
            const double g = gap(phi);
            if ((prev_g > 0.0) != (g > 0.0)) {
                double lo = prev_phi, hi = phi, glo = prev_g;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = gap(mid);
                    if ((glo > 0.0) == (gm > 0.0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                cuts.push_back(0.5 * (lo + hi));
            }
            prev_phi = phi;
            prev_g = g;
        }
        cuts.push_back(-M_PI);
        cuts.push_back(M_PI);
        std::sort(cuts.begin(), cuts.end());

        // Phi vanishes below separation d, so only intervals with gap > 0
        // contribute; the integrand is analytic inside each.
        double inner = 0.0;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double a = cuts[c], b = cuts[c + 1];
            if (b - a < 1e-14) continue;
            if (gap(0.5 * (a + b)) <= 0.0) continue;
            inner += gauss_composite(rule, a, b, 0.2, [&](double phi) {
                const CurvePoint p2 = point_at(theta + phi);
                const double r12 = chord(p1, p2);
                const double phi_val = std::log(r12 / d) / (2.0 * M_PI);
                return phi_val * tangent_dot(p1, p2);
            });
        }
        outer_sum += inner;
    }
    return -outer_sum * 2.0 * M_PI / n_theta;
}

// --- 3-shell --------------------------------------------------------------

ShellSpec::ShellSpec(double rho)
{
    if (rho < 0.0) throw std::domain_error("ShellSpec: inner radius must be >= 0");
    inner_radius = rho;
    outer_radius = std::cbrt(rho * rho * rho + 3.0 / (4.0 * M_PI));
}

namespace {

// Fraction of the sphere of radius d centered at radius r that lies within
// distance R of the origin (area fraction of a spherical cap).
inline double cap_fraction(double r, double d, double R)
{
    if (R <= 0.0) return 0.0;
    if (r + d <= R) return 1.0;
    if (std::abs(r - d) >= R) return (r * r + d * d <= R * R) ? 1.0 : 0.0;
    return std::clamp(0.5 * (1.0 + (R * R - r * r - d * d) / (2.0 * r * d)), 0.0, 1.0);
}

} // namespace

double shell_probability(const ShellSpec& shell, const ProblemSpec& spec)
{
    if (spec.dimension != 3)
        throw std::domain_error("shell_probability: requires N = 3");
    const double d = spec.jump;
    if (d <= 0.0) throw std::domain_error("shell_probability: d must be > 0");
    const double rho = shell.inner_radius, R = shell.outer_radius;

    auto fraction = [&](double r) {
        return cap_fraction(r, d, R) - cap_fraction(r, d, rho);
    };

    // Kinks of the integrand sit where a cap opens or closes.
    std::vector<double> pts = {rho, R};
    for (double b : {R - d, d - R, R + d, rho - d, d - rho, rho + d})
        if (b > rho && b < R) pts.push_back(b);
    std::sort(pts.begin(), pts.end());

    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] - pts[i] < 1e-15) continue;
        integral += gauss_integrate(gauss64(), pts[i], pts[i + 1], [&](double r) {
            return r * r * fraction(r);
        });
    }
    // Start radius is uniform over the unit-volume shell.
    return 4.0 * M_PI * integral;
}

std::pair<double, double> optimal_shell_radius(double d)
{
    const double r03 = unit_ball_radius(3);
    if (d <= r03 || d > 2.5 * r03)
        throw std::domain_error("optimal_shell_radius: requires R_{0,3} < d <= 2.5*R_{0,3}");
    const ProblemSpec spec(3, d);
    auto objective = [&](double rho) {
        return shell_probability(ShellSpec(rho), spec);
    };

    double lo = std::max(0.0, d - r03 - 0.2), hi = d;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = objective(a), fb = objective(b);
    while (hi - lo > 1e-6) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = objective(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = objective(a);
        }
    }
    const double rho = 0.5 * (lo + hi);
    return {rho, objective(rho)};
}

// --- half-space hyperspherical integral -----------------------------------

namespace {

// Angular integral of cos(z cos(phi_1)) over the unit sphere in R^{N-1},
// by direct quadrature (no Bessel identities).
const GaussRule& cached_gauss(int nodes)
{
    static std::map<int, GaussRule> cache;
    auto it = cache.find(nodes);
    if (it == cache.end()) it = cache.emplace(nodes, make_gauss(nodes)).first;
    return it->second;
}

double angular_cos_integral(int dim, double z)
{
    if (dim == 2) return 2.0 * std::cos(z);
    // Round up so rules are shared across nearby z.
    const int nodes =
        std::min(4096, 64 * (1 + (32 + 6 * static_cast<int>(std::abs(z))) / 64));
    if (dim == 3) {
        // circle: int_0^{2pi} cos(z cos phi) dphi
        return gauss_composite(cached_gauss(nodes / 4), 0.0, 2.0 * M_PI,
                               M_PI / 2.0 + 1e-9,
                               [z](double phi) { return std::cos(z * std::cos(phi)); });
    }
    if (dim == 4) {
        // sphere: 2pi int_{-1}^{1} cos(z u) du
        return 2.0 * M_PI *
               gauss_integrate(cached_gauss(nodes), -1.0, 1.0,
                               [z](double u) { return std::cos(z * u); });
    }
    throw std::domain_error("halfspace_stability_numeric: N must be in {2,3,4}");
}

double total_solid_angle(int dim)
{
    if (dim == 2) return 2.0;             // two directions on the line
    if (dim == 3) return 2.0 * M_PI;      // circle
    if (dim == 4) return 4.0 * M_PI;      // sphere
    throw std::domain_error("halfspace_stability_numeric: N must be in {2,3,4}");
}

} // namespace

double halfspace_stability_numeric(double k, const ProblemSpec& spec)
{
    const int dim = spec.dimension;
    const double d = spec.jump;
    if (k <= 0.0) throw std::domain_error("halfspace_stability_numeric: k must be > 0");
    const double omega = total_solid_angle(dim);
    const double c = dim > 2 ? d / ((dim - 2) * spec.sphere_area) : 0.0;

    auto phi_val = [&](double r) -> double {
        if (dim == 2) return r > d ? std::log(r / d) / (2.0 * M_PI) : 0.0;
        if (r <= d) return -c;
        return -c * std::pow(d / r, dim - 2);
    };
    auto phi_deriv = [&](double r) -> double {
        if (r <= d) return 0.0;
        if (dim == 2) return 1.0 / (2.0 * M_PI * r);
        return c * (dim - 2) * std::pow(d, dim - 2) / std::pow(r, dim - 1);
    };

    const auto& rule = gauss20();

    // Inner region [0, d]: Phi constant (zero for N = 2).
    double head = 0.0;
    if (dim > 2) {
        head = gauss_composite(rule, 0.0, d, std::min(d, M_PI / k), [&](double r) {
            return std::pow(r, dim - 2) * angular_cos_integral(dim, k * r) * k * k *
                   phi_val(r);
        });
    }

    // Tail [d, inf) splits into a smooth part with an elementary
    // antiderivative and an oscillatory part.
    //   smooth:      omega * r^{N-3} Phi'(r)      -> omega * C2 / d
    //   oscillatory: Q(kr) * (k^2 r^{N-2} Phi(r) - r^{N-3} Phi'(r))
    const double c2 =
        dim == 2 ? 1.0 / (2.0 * M_PI) : c * (dim - 2) * std::pow(d, dim - 2);
    const double smooth_tail = omega * c2 / d;

    auto osc_integrand = [&](double r) {
        return angular_cos_integral(dim, k * r) *
               (k * k * std::pow(r, dim - 2) * phi_val(r) -
                std::pow(r, dim - 3) * phi_deriv(r));
    };

    // Panels between consecutive zeros of the angular factor Q, so the panel
    // integrals alternate in sign; partial sums accelerated with Wynn's
    // epsilon algorithm.
    const int max_terms = 72;
    std::vector<double> partial;
    partial.reserve(max_terms);
    double acc = 0.0;
    double left = d;
    double scan = d;
    double q_prev = angular_cos_integral(dim, k * scan);
    const double step = 0.1 * M_PI / k;
    int guard = 0;
    while (static_cast<int>(partial.size()) < max_terms && guard++ < 100000) {
        const double next = scan + step;
        const double q_next = angular_cos_integral(dim, k * next);
        if ((q_prev > 0.0) != (q_next > 0.0)) {
            double lo = scan, hi = next, qlo = q_prev;
            for (int it = 0; it < 30; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double qm = angular_cos_integral(dim, k * mid);
                if ((qlo > 0.0) == (qm > 0.0)) {
                    lo = mid;
                    qlo = qm;
                } else {
                    hi = mid;
                }
            }
            const double zero = 0.5 * (lo + hi);
            acc += gauss_integrate(rule, left, zero, osc_integrand);
            partial.push_back(acc);
            left = zero;
        }
        scan = next;
        q_prev = q_next;
    }

    const int n = static_cast<int>(partial.size());
    if (n < 8)
        throw std::runtime_error(
            "halfspace_stability_numeric: too few oscillation periods found");
    std::vector<double> prev_col(n + 1, 0.0);  // epsilon_{-1}
    std::vector<double> col = partial;         // epsilon_0
    double est = col.back(), prev_est = est, achieved = 1.0;
    for (int level = 1; level < n; ++level) {
        std::vector<double> next_col(col.size() - 1);
        bool degenerate = false;
        for (std::size_t j = 0; j + 1 < col.size(); ++j) {
            const double diff = col[j + 1] - col[j];
            if (std::abs(diff) < 1e-14 * (std::abs(col[j]) + 1.0)) {
                degenerate = true;
                break;
            }
            next_col[j] = prev_col[j + 1] + 1.0 / diff;
        }
        if (degenerate || next_col.empty()) break;
        prev_col = std::move(col);
        col = std::move(next_col);
        if (level % 2 == 0) {
            prev_est = est;
            est = col.back();
            achieved = std::abs(est - prev_est);
            if (achieved < 1e-13) break;
        }
    }
    if (achieved > 1e-8)
        throw std::runtime_error(
            "halfspace_stability_numeric: radial quadrature did not converge "
            "(achieved " +
            std::to_string(achieved) + ")");

    return -0.5 * (head + smooth_tail + est);
}

} // namespace ghop::oracle
