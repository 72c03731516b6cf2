#include "slap/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "slap/errors.hpp"

namespace slap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(i) for i in [0, n). fn must not throw; results go into slots
// indexed by i, so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(int n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1)));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) fn(i);
        });
    }
}

}  // namespace

SpatialGrid SpatialGrid::symmetric(double half_width, int n_points) {
    return {-half_width, half_width, n_points};
}

double SpatialGrid::x(int i) const noexcept {
    if (n_points <= 1) return x_min;
    // Reflect through the centre so symmetric grids give exactly mirrored
    // points and an exact zero in the middle.
    if (2 * i + 1 == n_points) return 0.5 * (x_min + x_max);
    if (2 * i + 1 > n_points) return x_max - (n_points - 1 - i) * spacing();
    return x_min + i * spacing();
}

std::vector<double> SpatialGrid::points() const {
    std::vector<double> xs(static_cast<std::size_t>(std::max(n_points, 0)));
    for (int i = 0; i < n_points; ++i) xs[static_cast<std::size_t>(i)] = x(i);
    return xs;
}

void SpatialGrid::validate() const {
    if (!std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw ValidationError("grid.x_min_nm", "grid bounds must be finite");
    }
    if (n_points == 1 && x_min == x_max) return;
    if (n_points < 3 || n_points % 2 == 0) {
        throw ValidationError("grid.n_points", "must be an odd count >= 3");
    }
    if (!(x_min < x_max)) throw ValidationError("grid.x_max_nm", "must exceed grid.x_min_nm");
}

PartialScan scan_survival_partial(const SpatialGrid& grid, Protocol protocol, const FieldSpec& f,
                                  const AtomSpec& atom, const IntegratorConfig& ic,
                                  ParallelOptions par) {
    grid.validate();
    f.validate();
    atom.validate();
    ic.validate();
    (void)schedule(protocol, f);  // rejects a SLAP schedule without delay up front

    const std::vector<double> xs = grid.points();
    const int n = grid.n_points;
    std::vector<double> p11(static_cast<std::size_t>(n), kNaN);
    std::vector<std::optional<PointFailure>> failed(static_cast<std::size_t>(n));

    parallel_for(n, par.threads, [&](int i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            p11[k] = survival_probability(xs[k], protocol, f, atom, ic);
        } catch (const IntegrationFailure& e) {
            failed[k] = PointFailure{i, xs[k], e.time(), e.what()};
        } catch (const std::exception& e) {
            failed[k] = PointFailure{i, xs[k], kNaN, e.what()};
        }
    });

    PartialScan out;
    out.profile.grid = grid;
    out.profile.p11 = std::move(p11);
    out.profile.protocol = protocol;
    for (auto& fail : failed) {
        if (fail) out.failures.push_back(std::move(*fail));
    }
    return out;
}

SurvivalProfile scan_survival(const SpatialGrid& grid, Protocol protocol, const FieldSpec& f,
                              const AtomSpec& atom, const IntegratorConfig& ic, ParallelOptions par) {
    PartialScan scan = scan_survival_partial(grid, protocol, f, atom, ic, par);
    if (!scan.failures.empty()) {
        const PointFailure& first = scan.failures.front();
        throw IntegrationFailure(fmt::format("scan failed at x = {:.6g} m: {}", first.x, first.message),
                                 first.time);
    }
    return std::move(scan.profile);
}

std::vector<double> lattice_samples(const SpatialGrid& grid, const LatticeSpec& lat,
                                    const TrapDerived& trap) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(grid.n_points));
    for (double x : grid.points()) out.push_back(lattice_density(x, lat, trap));
    return out;
}

std::vector<double> final_distribution(const SurvivalProfile& profile, const LatticeSpec& lat,
                                       const TrapDerived& trap) {
    std::vector<double> rho = lattice_samples(profile.grid, lat, trap);
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] *= profile.p11[i];
    return rho;
}

double numeric_fwhm(const SurvivalProfile& profile) {
    return numeric_fwhm(profile.grid, profile.p11);
}

double numeric_fwhm(const SpatialGrid& grid, std::span<const double> v) {
    const std::size_t n = v.size();
    if (n < 3 || n != static_cast<std::size_t>(grid.n_points)) {
        throw NoPeak("profile needs at least three samples matching its grid");
    }
    if (std::any_of(v.begin(), v.end(), [](double y) { return !std::isfinite(y); })) {
        throw NoPeak("profile contains failed samples");
    }
    const auto peak_it = std::max_element(v.begin(), v.end());
    const std::size_t ip = static_cast<std::size_t>(peak_it - v.begin());
    const double peak = *peak_it;
    const double floor_left = *std::min_element(v.begin(), v.begin() + ip + 1);
    const double floor_right = *std::min_element(v.begin() + ip, v.end());
    if (!(peak > 2.0 * floor_left && peak > 2.0 * floor_right)) {
        throw NoPeak(fmt::format(
            "no central peak: maximum {:.6g} is not twice the far-field floor ({:.6g}, {:.6g})", peak,
            floor_left, floor_right));
    }

    const double floor = std::max(floor_left, floor_right);
    const double half = floor + 0.5 * (peak - floor);

    std::size_t lo = ip;
    while (lo > 0 && v[lo - 1] >= half) --lo;
    std::size_t hi = ip;
    while (hi + 1 < n && v[hi + 1] >= half) ++hi;
    if (lo == 0 || hi + 1 == n) throw NoPeak("half-maximum crossing lies outside the grid");

    for (std::size_t i = 0; i < n; ++i) {
        if ((i < lo || i > hi) && v[i] >= half) {
            throw AmbiguousPeak(fmt::format("second region above half maximum at sample {}", i));
        }
    }

    const std::vector<double> xs = grid.points();
    auto crossing = [&](std::size_t below, std::size_t above) {
        return xs[below] + (half - v[below]) * (xs[above] - xs[below]) / (v[above] - v[below]);
    };
    return crossing(hi + 1, hi) - crossing(lo - 1, lo);
}

double simpson(std::span<const double> y, double h) {
    const std::size_t n = y.size();
    if (n < 3 || n % 2 == 0) throw Error("simpson: need an odd number of samples >= 3");
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) (i % 2 == 1 ? odd : even) += y[i];
    return h / 3.0 * (y.front() + 4.0 * odd + 2.0 * even + y.back());
}

double site_probability(int site, const SurvivalProfile& profile, const LatticeSpec& lat,
                        const TrapDerived& trap, int window_points) {
    const SpatialGrid& grid = profile.grid;
    const double center = lat.site_center(site);
    const double lo = center - 0.25 * lat.lambda;
    const double hi = center + 0.25 * lat.lambda;
    if (grid.n_points < 3) throw WindowNotCovered("grid has fewer than three samples");
    const double h = grid.spacing();
    const double slack = 1e-9 * h;
    if (lo < grid.x_min - slack || hi > grid.x_max + slack) {
        throw WindowNotCovered(fmt::format("grid [{:.6g}, {:.6g}] m does not cover site {} window [{:.6g}, {:.6g}] m",
                                           grid.x_min, grid.x_max, site, lo, hi));
    }
    if (profile.p11.size() != static_cast<std::size_t>(grid.n_points)) {
        throw Error("profile length does not match its grid");
    }

    std::vector<double> rho1;
    std::vector<double> rho_lat;
    double step = 0.0;

    const double first = (lo - grid.x_min) / h;
    const double intervals = (hi - lo) / h;
    const bool aligned = std::abs(first - std::round(first)) < 1e-6 &&
                         std::abs(intervals - std::round(intervals)) < 1e-6 &&
                         std::lround(intervals) % 2 == 0 && std::lround(intervals) >= 2;
    const std::vector<double> xs = grid.points();
    if (aligned) {
        const std::size_t i0 = static_cast<std::size_t>(std::lround(first));
        const std::size_t count = static_cast<std::size_t>(std::lround(intervals)) + 1;
        step = h;
        for (std::size_t k = i0; k < i0 + count; ++k) {
            const double rl = lattice_density(xs[k], lat, trap);
            rho_lat.push_back(rl);
            rho1.push_back(profile.p11[k] * rl);
        }
    } else {
        if (window_points < 3 || window_points % 2 == 0) {
            throw Error("site_probability: window_points must be odd and >= 3");
        }
        step = (hi - lo) / (window_points - 1);
        for (int k = 0; k < window_points; ++k) {
            const double x = lo + k * step;
            const double pos = std::clamp((x - grid.x_min) / h, 0.0, double(grid.n_points - 1));
            const std::size_t j = std::min(static_cast<std::size_t>(pos), static_cast<std::size_t>(grid.n_points - 2));
            const double frac = pos - static_cast<double>(j);
            const double p = profile.p11[j] + frac * (profile.p11[j + 1] - profile.p11[j]);
            const double rl = lattice_density(x, lat, trap);
            rho_lat.push_back(rl);
            rho1.push_back(p * rl);
        }
    }
    if (std::any_of(rho1.begin(), rho1.end(), [](double y) { return !std::isfinite(y); })) {
        throw Error(fmt::format("site {} window contains failed samples", site));
    }
    const double denom = simpson(rho_lat, step);
    if (!(denom > 0.0)) throw WindowNotCovered(fmt::format("no lattice density in the site {} window", site));
    return simpson(rho1, step) / denom;
}

double efficiency(double p_x0, double p_x1) { return p_x0 * (1.0 - p_x1); }

AddressingReport addressing_report(const SurvivalProfile& profile, const LatticeSpec& lat,
                                   const TrapDerived& trap, const AnalyticParams& analytic) {
    AddressingReport rep;
    rep.r = analytic.r;
    rep.protocol = profile.protocol;
    auto note = [&](const char* what, const std::exception& e) {
        rep.errors.push_back(fmt::format("{}: {}", what, e.what()));
    };

    rep.dx_numeric = kNaN;
    try {
        rep.dx_numeric = numeric_fwhm(profile);
    } catch (const Error& e) {
        note("numeric_fwhm", e);
    }

    rep.p_x0 = rep.p_x1 = rep.eta_numeric = kNaN;
    try {
        rep.p_x0 = site_probability(0, profile, lat, trap);
        rep.p_x1 = site_probability(1, profile, lat, trap);
        rep.eta_numeric = efficiency(rep.p_x0, rep.p_x1);
    } catch (const Error& e) {
        note("site_probability", e);
    }

    rep.dx_analytic = rep.p_x0_analytic = rep.p_x1_analytic = rep.eta_analytic = kNaN;
    try {
        const Technique technique = profile.protocol == Protocol::slap ? Technique::slap : Technique::cpt;
        rep.dx_analytic = technique_fwhm(technique, analytic);
        const SiteProbabilities sp = analytic_site_probs(rep.dx_analytic, trap.dx_at, lat.spacing());
        rep.p_x0_analytic = sp.p_x0;
        rep.p_x1_analytic = sp.p_x1;
        rep.eta_analytic = sp.eta;
    } catch (const Error& e) {
        note("analytic", e);
    }
    return rep;
}

SurvivalProfile refine_profile(const SurvivalProfile& start, const FieldSpec& f, const AtomSpec& atom,
                               const LatticeSpec& lat, const TrapDerived& trap,
                               const IntegratorConfig& ic, double tol, int max_levels,
                               ParallelOptions par) {
    SurvivalProfile current = start;
    double p0 = site_probability(0, current, lat, trap);
    double p1 = site_probability(1, current, lat, trap);
    for (int level = 0; level < max_levels; ++level) {
        SpatialGrid finer = current.grid;
        finer.n_points = 2 * current.grid.n_points - 1;
        SurvivalProfile next = scan_survival(finer, current.protocol, f, atom, ic, par);
        next.provenance = start.provenance;
        const double q0 = site_probability(0, next, lat, trap);
        const double q1 = site_probability(1, next, lat, trap);
        const bool converged = std::abs(q0 - p0) < tol && std::abs(q1 - p1) < tol;
        current = std::move(next);
        p0 = q0;
        p1 = q1;
        if (converged) break;
    }
    return current;
}

std::vector<AddressingReport> sweep_r(std::span<const double> values, const SweepInputs& in) {
    const TrapDerived trap = derive_trap(in.lattice, in.atom);
    std::vector<AddressingReport> rows;
    rows.reserve(values.size() * in.protocols.size());
    for (double r : values) {
        for (Protocol protocol : in.protocols) {
            AddressingReport rep;
            rep.r = r;
            rep.protocol = protocol;
            try {
                if (!(r >= 0.0) || !std::isfinite(r)) {
                    throw ValidationError("sweep.values", fmt::format("R = {} must be finite and >= 0", r));
                }
                FieldSpec f = in.base;
                f.omega_p0 = f.omega_s0 * std::sqrt(r);
                const AnalyticParams analytic = AnalyticParams::from_field(f, in.a_const);
                PartialScan scan = scan_survival_partial(in.grid, protocol, f, in.atom, in.integrator, in.parallel);
                rep = addressing_report(scan.profile, in.lattice, trap, analytic);
                rep.r = r;
                rep.integration_failures = static_cast<int>(scan.failures.size());
                for (const PointFailure& fail : scan.failures) {
                    rep.errors.insert(rep.errors.begin(),
                                      fmt::format("integration at x = {:.6g} m: {}", fail.x, fail.message));
                }
            } catch (const std::exception& e) {
                const double nan = kNaN;
                rep.dx_numeric = rep.p_x0 = rep.p_x1 = rep.eta_numeric = nan;
                rep.dx_analytic = rep.p_x0_analytic = rep.p_x1_analytic = rep.eta_analytic = nan;
                rep.errors.push_back(e.what());
            }
            rows.push_back(std::move(rep));
        }
    }
    return rows;
}

}  // namespace slap
