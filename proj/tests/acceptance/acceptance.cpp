// Acceptance checks, one PASS/FAIL line per check. Usage: acceptance <1..7>
// (or no argument for all). Exit status is non-zero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "slap/analytics.hpp"
#include "slap/dynamics.hpp"
#include "slap/scan.hpp"

using namespace slap;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    fmt::print("[{}] criterion {}: {} ({})\n", ok ? "PASS" : "FAIL", criterion, name, detail);
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

AnalyticParams reference(double r, double pulse_area = oracle::kPulseArea) {
    return AnalyticParams::from_ratio(r, oracle::kWp, oracle::kWs, pulse_area / oracle::kDelay,
                                      {oracle::kA, oracle::kDelay});
}

struct Numeric {
    double p_x0, p_x1, eta;
};

Numeric numeric_eta(double r, Protocol proto) {
    const LatticeSpec lat = oracle::lattice();
    const TrapDerived trap = derive_trap(lat, oracle::rb87());
    const auto profile = scan_survival(SpatialGrid::symmetric(oracle::kLambda, 201), proto, oracle::field(r),
                                       oracle::rb87(), {});
    const double p0 = site_probability(0, profile, lat, trap);
    const double p1 = site_probability(1, profile, lat, trap);
    return {p0, p1, efficiency(p0, p1)};
}

void criterion1() {
    const TrapDerived trap = derive_trap(oracle::lattice(), oracle::rb87());
    const double f = trap.omega_trap / (2.0 * std::numbers::pi);
    report(1, "trap frequency within 2% of 15.92 kHz", std::abs(f / 15.92e3 - 1.0) <= 0.02,
           fmt::format("{:.4f} kHz, {:+.2f}%", f / 1e3, 100.0 * (f / 15.92e3 - 1.0)));
    report(1, "site width 142 +/- 2 nm", std::abs(trap.dx_at - 142e-9) <= 2e-9,
           fmt::format("{:.3f} nm", trap.dx_at / 1e-9));
}

void criterion2() {
    const double dx = slap_fwhm(reference(10.0));
    const double target = oracle::kLambdaL / 3;
    report(2, "SLAP width within 5% of lambda_L/3", std::abs(dx / target - 1.0) <= 0.05,
           fmt::format("{:.3f} nm vs {:.3f} nm", dx / 1e-9, target / 1e-9));
    const double exact = double(oracle::slap_width(oracle::r_prime_of(10.0L, oracle::kWp, oracle::kWs), oracle::kWs,
                                                   oracle::kPulseArea, oracle::kA));
    report(2, "SLAP width matches 256.5 nm reference", std::abs(dx - 256.5e-9) <= 1e-9 &&
                                                           std::abs(dx / exact - 1.0) < 1e-12,
           fmt::format("{:.4f} nm, long-double {:.4f} nm", dx / 1e-9, exact / 1e-9));
}

void criterion3() {
    const double eta_lo = analytic_site_probs(142e-9, 142e-9, 532e-9).eta;
    report(3, "eta at dx = dx_at is 0.707 +/- 0.01", std::abs(eta_lo - 0.707) <= 0.01, fmt::format("{:.6f}", eta_lo));
    const double eta_hi = analytic_site_probs(532e-9 - 142e-9, 142e-9, 532e-9).eta;
    report(3, "eta at dx = x1 - dx_at is 0.93 +/- 0.01", std::abs(eta_hi - 0.93) <= 0.01, fmt::format("{:.6f}", eta_hi));
}

void criterion4() {
    const AnalyticParams p = reference(10.0);
    const TrapDerived trap = derive_trap(oracle::lattice(), oracle::rb87());
    for (auto [label, dx_at] : {std::pair{"dx_at = 142 nm", 142e-9}, std::pair{"derived dx_at", trap.dx_at}}) {
        const SsaWindow w = ssa_window(p, 532e-9, dx_at);
        report(4, fmt::format("window near (15.9, 19.9), {}", label),
               w.feasible && std::abs(w.lower - 15.9) < 0.1 && std::abs(w.upper - 19.9) < 0.1,
               fmt::format("({:.5f}, {:.5f})", w.lower, w.upper));
        report(4, fmt::format("window contains 19, {}", label), w.contains(19.0),
               fmt::format("feasible={}", w.feasible));
        const double at_upper = slap_fwhm(reference(10.0, w.upper));
        const double at_lower = slap_fwhm(reference(10.0, w.lower));
        report(4, fmt::format("upper bound reproduces x+, {}", label), std::abs(at_upper / w.x_plus - 1.0) <= 0.01,
               fmt::format("{:.4f} nm vs {:.4f} nm", at_upper / 1e-9, w.x_plus / 1e-9));
        report(4, fmt::format("lower bound reproduces x-, {}", label), std::abs(at_lower / w.x_minus - 1.0) <= 0.01,
               fmt::format("{:.4f} nm vs {:.4f} nm", at_lower / 1e-9, w.x_minus / 1e-9));
    }
}

void criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    const Numeric slap = numeric_eta(10.0, Protocol::slap);
    const Numeric cpt = numeric_eta(10.0, Protocol::cpt);
    const double elapsed = seconds_since(t0);
    report(5, "SLAP eta at R = 10 is 0.95 +/- 0.05", std::abs(slap.eta - 0.95) <= 0.05,
           fmt::format("eta={:.4f} p_x0={:.4f} p_x1={:.4f}", slap.eta, slap.p_x0, slap.p_x1));
    report(5, "CPT eta at R = 10 is 0.56 +/- 0.07", std::abs(cpt.eta - 0.56) <= 0.07,
           fmt::format("eta={:.4f} p_x0={:.4f} p_x1={:.4f}", cpt.eta, cpt.p_x0, cpt.p_x1));
    report(5, "two 201-point scans within 60 s", elapsed <= 60.0, fmt::format("{:.2f} s", elapsed));
}

void criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    const TrapDerived trap = derive_trap(oracle::lattice(), oracle::rb87());
    std::map<double, Numeric> slap, cpt;
    for (double r : {5.0, 10.0, 20.0, 40.0, 50.0, 100.0}) slap[r] = numeric_eta(r, Protocol::slap);
    for (double r : {5.0, 10.0, 20.0, 40.0}) cpt[r] = numeric_eta(r, Protocol::cpt);
    for (double r : {5.0, 10.0, 20.0, 40.0}) {
        report(6, fmt::format("SLAP beats CPT at R = {}", r), slap[r].eta > cpt[r].eta,
               fmt::format("{:.4f} vs {:.4f}", slap[r].eta, cpt[r].eta));
    }
    for (double r : {5.0, 10.0, 20.0, 50.0, 100.0}) {
        const double dx = slap_fwhm(reference(r));
        const double eta_an = analytic_site_probs(dx, trap.dx_at, oracle::lattice().spacing()).eta;
        const double diff = std::abs(slap[r].eta - eta_an);
        report(6, fmt::format("SLAP numeric vs analytic eta within 0.1 at R = {}", r), diff <= 0.1,
               fmt::format("numeric {:.4f}, analytic {:.4f}, |diff| {:.4f}", slap[r].eta, eta_an, diff));
    }
    const double elapsed = seconds_since(t0);
    report(6, "sweep within 10 min", elapsed <= 600.0, fmt::format("{:.2f} s", elapsed));
}

void criterion7() {
    const AtomSpec atom = oracle::rb87();
    AtomSpec closed = atom;
    closed.gamma21 = closed.gamma23 = 0.0;

    double trace_err = 0.0, herm_err = 0.0, min_eig = 1.0, purity_err = 0.0;
    int runs = 0;
    for (double r : {1.0, 10.0, 100.0}) {
        for (Protocol proto : {Protocol::slap, Protocol::cpt}) {
            for (double x : {0.0, 133e-9, 266e-9, 532e-9, 1064e-9, 30e-6}) {
                const auto end = evolve_site(x, proto, oracle::field(r), atom, {}, [&](double, const DensityMatrix& rho) {
                    trace_err = std::max(trace_err, std::abs(rho.trace() - 1.0));
                    herm_err = std::max(herm_err, rho.hermiticity_error());
                });
                min_eig = std::min(min_eig, end.min_eigenvalue());
                evolve_site(x, proto, oracle::field(r), closed, {}, [&](double, const DensityMatrix& rho) {
                    purity_err = std::max(purity_err, std::abs(rho.purity() - 1.0));
                });
                ++runs;
            }
        }
    }
    report(7, "trace within 1e-6 at every step", trace_err < 1e-6, fmt::format("max {:.2e} over {} runs", trace_err, runs));
    report(7, "Hermitian within 1e-10", herm_err < 1e-10, fmt::format("max {:.2e}", herm_err));
    report(7, "minimum eigenvalue >= -1e-8", min_eig >= -1e-8, fmt::format("min {:.2e}", min_eig));
    report(7, "closed-system purity within 1e-6", purity_err < 1e-6, fmt::format("max {:.2e}", purity_err));

    double node = 0.0;
    for (double r : {1.0, 10.0, 100.0})
        node = std::max(node, std::abs(survival_probability(0.0, Protocol::slap, oracle::field(r), atom, {}) - 1.0));
    report(7, "node survival 1 within 1e-6", node < 1e-6, fmt::format("max |p - 1| {:.2e}", node));

    const SpatialGrid g = SpatialGrid::symmetric(oracle::kLambda, 41);
    bool identical = true;
    for (Protocol proto : {Protocol::slap, Protocol::cpt}) {
        const auto a = scan_survival(g, proto, oracle::field(10.0), atom, {}, {.threads = 1});
        const auto b = scan_survival(g, proto, oracle::field(10.0), atom, {}, {.threads = 4});
        identical = identical && a.p11 == b.p11;
    }
    report(7, "serial and parallel scans bitwise identical", identical, "41 points, 1 vs 4 threads");

    const DesignParams fixed{oracle::kWp, oracle::kWs, oracle::kOmegaS0, {oracle::kA, oracle::kDelay}};
    double round_trip = 0.0;
    for (double r = 0.1; r <= 1e4; r *= 1.25)
        round_trip = std::max(round_trip, std::abs(required_r(slap_fwhm(fixed.with_ratio(r)), Technique::slap, fixed) / r - 1.0));
    report(7, "required_r inverts slap_fwhm within 1e-6", round_trip < 1e-6, fmt::format("max rel {:.2e}", round_trip));

    // Each site window of the lattice density against the sum of erf masses.
    double simpson_err = 0.0;
    const LatticeSpec lat = oracle::lattice();
    const TrapDerived trap = derive_trap(lat, atom);
    for (int site = -2; site <= 2; ++site) {
        const double a = lat.site_center(site) - lat.lambda / 4, b = lat.site_center(site) + lat.lambda / 4;
        const double h = (b - a) / 100;
        std::vector<double> y;
        for (int i = 0; i <= 100; ++i) y.push_back(lattice_density(a + i * h, lat, trap));
        double exact = 0.0;
        for (int m = -2; m <= 2; ++m) exact += oracle::gaussian_mass(a, b, lat.site_center(m), trap.w_at);
        simpson_err = std::max(simpson_err, std::abs(simpson(y, h) / exact - 1.0));
    }
    double cpt_err = 0.0;
    const double q4 = std::pow(oracle::kWp / oracle::kWs, 4);
    for (double target = 150e-9; target < 2.0 * oracle::kWs; target *= 1.5) {
        const double k = 2.0 * oracle::kWs / target;
        const double closed_form = q4 * (k * k - 1.0) * (k * k - 1.0);
        cpt_err = std::max(cpt_err, std::abs(required_r(target, Technique::cpt, fixed) / closed_form - 1.0));
    }
    report(7, "CPT closed-form inversion matches bisection within 1e-8", cpt_err < 1e-8, fmt::format("max rel {:.2e}", cpt_err));
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<void (*)()> criteria{criterion1, criterion2, criterion3, criterion4,
                                           criterion5, criterion6, criterion7};
    if (argc > 1) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > static_cast<int>(criteria.size())) {
            fmt::print(stderr, "usage: {} [1-{}]\n", argv[0], criteria.size());
            return 2;
        }
        criteria[n - 1]();
    } else {
        for (auto c : criteria) c();
    }
    return failures == 0 ? 0 : 1;
}
