#include "slap/analytics.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "slap/errors.hpp"
#include "slap/roots.hpp"

namespace slap {

namespace {

constexpr double kThresholdTol = 1e-10;
constexpr double kDesignTol = 1e-8;

}  // namespace

AnalyticParams AnalyticParams::from_ratio(double r, double w_p, double w_s, double omega_s0,
                                          AdiabaticityConfig adiabatic) {
    AnalyticParams p;
    p.r = r;
    const double q = w_s / w_p;
    p.r_prime = r * q * q * q * q;
    p.w_p = w_p;
    p.w_s = w_s;
    p.omega_s0 = omega_s0;
    p.adiabatic = adiabatic;
    return p;
}

AnalyticParams AnalyticParams::from_field(const FieldSpec& f, double a_const) {
    return from_ratio(f.ratio(), f.w_p, f.w_s, f.omega_s0, {a_const, f.delay()});
}

double AnalyticParams::real_valued_bound() const noexcept {
    if (r_prime <= 0.0) return std::numeric_limits<double>::infinity();
    return adiabatic.a_const * std::sqrt((1.0 + r_prime) / r_prime);
}

void AnalyticParams::validate() const {
    if (!(r >= 0.0)) throw ValidationError("analytic.r", "must be >= 0");
    if (!(w_p > 0.0)) throw ValidationError("analytic.w_p", "must be > 0");
    if (!(w_s > 0.0)) throw ValidationError("analytic.w_s", "must be > 0");
    if (!(omega_s0 > 0.0)) throw ValidationError("analytic.omega_s0", "must be > 0");
    if (!(adiabatic.a_const > 0.0)) throw ValidationError("adiabatic.a_const", "must be > 0");
    if (!(adiabatic.t_delay > 0.0)) throw ValidationError("adiabatic.t_delay", "must be > 0");
}

double adiabatic_threshold_x(const AnalyticParams& p) {
    p.validate();
    const double T = p.adiabatic.t_delay;
    if (p.pulse_area() >= p.adiabatic.a_const) return 0.0;

    const double omega_p0 = p.omega_s0 * std::sqrt(p.r);
    const double target = p.adiabatic.a_const / T;
    // Normalised so that the root is where excess(x) crosses zero from below.
    auto excess = [&](double x) {
        const double x2 = x * x;
        const double s = p.omega_s0 * std::exp(-x2 / (p.w_s * p.w_s)) / target;
        const double q = omega_p0 * -std::expm1(-x2 / (p.w_p * p.w_p)) / target;
        return s * s + q * q - 1.0;
    };

    // Scan outward until the first sign change. Beyond a few widths the
    // Stokes term is gone and the pump term is constant, so only the far-field
    // limit remains to check.
    const double step = std::min(p.w_p, p.w_s) / 64.0;
    const double reach = 6.0 * std::max(p.w_p, p.w_s);
    double lo = 0.0;
    for (double hi = step; hi <= reach + step; hi += step) {
        if (excess(hi) >= 0.0) {
            return bisect([&](double x) { return excess(x); }, lo, hi,
                          {.rel_tol = kThresholdTol, .abs_tol = 0.0});
        }
        lo = hi;
    }
    throw NoThreshold(fmt::format(
        "adiabaticity condition never met: peak effective Rabi frequency stays below A/T = {:.6g} rad/s",
        target));
}

double slap_fwhm(const AnalyticParams& p) {
    p.validate();
    const double rp = p.r_prime;
    const double ratio = p.adiabatic.a_const / p.pulse_area();
    const double discriminant = (rp + 1.0) * ratio * ratio - rp;
    if (!(discriminant >= 0.0) || p.pulse_area() >= p.real_valued_bound()) {
        throw NotRealValued(fmt::format(
            "SLAP width not real: Omega_S0 T = {:.6g} must stay below A sqrt((1+R')/R') = {:.6g}",
            p.pulse_area(), p.real_valued_bound()));
    }
    return p.w_s * std::sqrt((1.0 + std::sqrt(discriminant)) / (rp + 1.0));
}

double cpt_fwhm(const AnalyticParams& p) {
    if (!(p.r_prime > 0.0)) throw ValidationError("analytic.r_prime", "CPT width needs R' > 0");
    if (!(p.w_s > 0.0)) throw ValidationError("analytic.w_s", "must be > 0");
    return 2.0 * p.w_s / std::sqrt(1.0 + std::sqrt(p.r_prime));
}

double window_zeta(double r_prime, double x, double w_s) noexcept {
    const double u = x / w_s;
    const double inner = (1.0 + r_prime) * u * u - 1.0;
    return std::sqrt((1.0 + r_prime) / (inner * inner + r_prime));
}

SsaWindow ssa_window(const AnalyticParams& p, double x1, double dx_at) {
    if (!(x1 > dx_at)) {
        throw InfeasibleGeometry(fmt::format(
            "no addressing window: neighbour distance {:.6g} m does not exceed site width {:.6g} m", x1,
            dx_at));
    }
    SsaWindow w;
    w.x_plus = dx_at;
    w.x_minus = x1 - dx_at;
    w.lower = p.adiabatic.a_const * window_zeta(p.r_prime, w.x_minus, p.w_s);
    w.upper = p.adiabatic.a_const * window_zeta(p.r_prime, w.x_plus, p.w_s);
    // The upper edge must also respect the real-valuedness bound; check it
    // rather than rely on zeta_+ being the tighter of the two. Below
    // w_s / sqrt(1 + R') zeta has no preimage, so such an x_plus is out too.
    const double narrowest = p.w_s / std::sqrt(1.0 + p.r_prime);
    w.feasible = w.lower < w.upper && w.upper < p.real_valued_bound() && w.x_plus > narrowest;
    return w;
}

SiteProbabilities analytic_site_probs(double dx, double dx_at, double x1) {
    const double s2 = dx * dx + dx_at * dx_at;
    SiteProbabilities out;
    out.p_x0 = dx / std::sqrt(s2);
    out.p_x1 = out.p_x0 * std::exp(-4.0 * std::numbers::ln2 * x1 * x1 / s2);
    out.eta = out.p_x0 * (1.0 - out.p_x1);
    return out;
}

double technique_fwhm(Technique technique, const AnalyticParams& p) {
    return technique == Technique::slap ? slap_fwhm(p) : cpt_fwhm(p);
}

double required_r(double dx_target, Technique technique, const DesignParams& fixed) {
    if (!(dx_target > 0.0)) throw Unachievable("target width must be positive");
    auto width = [&](double r) { return technique_fwhm(technique, fixed.with_ratio(r)); };

    // Both widths fall monotonically in R. The largest attainable width is
    // the R -> 0+ limit; the smallest is either 0 (R unbounded) or the
    // width at the real-valuedness bound on R' for SLAP.
    const double q = fixed.w_p / fixed.w_s;
    const double q4 = q * q * q * q;
    double r_hi = std::numeric_limits<double>::infinity();
    double widest = 0.0;
    if (technique == Technique::cpt) {
        widest = 2.0 * fixed.w_s;
    } else {
        const auto probe = fixed.with_ratio(0.0);
        probe.validate();
        const double ratio = probe.adiabatic.a_const / probe.pulse_area();
        widest = fixed.w_s * std::sqrt(1.0 + ratio);
        if (ratio <= 1.0) {
            // Omega_S0 T >= A: R' must stay below 1 / ((Omega_S0 T / A)^2 - 1).
            const double b = 1.0 / ratio;
            r_hi = b == 1.0 ? 0.0 : 1.0 / (b * b - 1.0) * q4;
        }
    }
    if (!(dx_target < widest)) {
        throw Unachievable(fmt::format("target width {:.6g} m is not below the R -> 0 limit {:.6g} m",
                                       dx_target, widest));
    }

    double lo = 0.0;
    double hi = 1.0;
    if (std::isfinite(r_hi)) {
        // Stay strictly inside the real-valued region.
        hi = r_hi * (1.0 - 1e-15);
        if (!(hi > 0.0) || width(hi) > dx_target) {
            throw Unachievable(fmt::format(
                "target width {:.6g} m is below the narrowest real-valued SLAP width", dx_target));
        }
    } else {
        while (width(hi) > dx_target) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e30) throw Unachievable("target width not reached for any finite R");
        }
    }
    // lo could be 0 where R' = 0 breaks cpt_fwhm; nudge it inside the domain.
    if (lo == 0.0) lo = std::min(hi * 1e-300, 1e-300);
    return bisect([&](double r) { return dx_target - width(r); }, lo, hi,
                  {.rel_tol = kDesignTol, .abs_tol = 0.0});
}

}  // namespace slap
