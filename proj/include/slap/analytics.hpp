#pragma once

// Closed-form addressing resolution, feasibility window and efficiency
// estimates, plus inverse design (which R gives a target width).

#include "slap/model.hpp"

namespace slap {

struct AdiabaticityConfig {
    double a_const = 20.0;  ///< dimensionless adiabaticity constant A
    double t_delay = 0.0;   ///< pulse delay T = t_p - t_s, s
};

struct AnalyticParams {
    double r = 0.0;        ///< (omega_p0 / omega_s0)^2
    double r_prime = 0.0;  ///< r (w_s / w_p)^4
    double w_p = 0.0;
    double w_s = 0.0;
    double omega_s0 = 0.0;
    AdiabaticityConfig adiabatic;

    /// Builds the parameter set for a given R, deriving r_prime.
    static AnalyticParams from_ratio(double r, double w_p, double w_s, double omega_s0,
                                     AdiabaticityConfig adiabatic);
    static AnalyticParams from_field(const FieldSpec& f, double a_const);

    /// Omega_S0 * T.
    double pulse_area() const noexcept { return omega_s0 * adiabatic.t_delay; }
    /// A sqrt((1 + R') / R'): the largest Omega_S0 T for which the SLAP width
    /// is real. Infinite when R' = 0.
    double real_valued_bound() const noexcept;

    void validate() const;
};

/// Everything of AnalyticParams except the intensity ratio.
struct DesignParams {
    double w_p = 0.0;
    double w_s = 0.0;
    double omega_s0 = 0.0;
    AdiabaticityConfig adiabatic;

    AnalyticParams with_ratio(double r) const {
        return AnalyticParams::from_ratio(r, w_p, w_s, omega_s0, adiabatic);
    }
};

struct SsaWindow {
    double lower = 0.0;    ///< A zeta_-
    double upper = 0.0;    ///< A zeta_+
    double x_plus = 0.0;   ///< dx_at, m
    double x_minus = 0.0;  ///< x1 - dx_at, m
    bool feasible = false;

    bool contains(double pulse_area) const noexcept {
        return feasible && lower < pulse_area && pulse_area < upper;
    }
};

struct SiteProbabilities {
    double p_x0 = 0.0;
    double p_x1 = 0.0;
    double eta = 0.0;
};

enum class Technique { slap, cpt };

/// Smallest x >= 0 at which the global adiabaticity condition becomes an
/// equality; 0 when it already holds at the node. Throws NoThreshold.
double adiabatic_threshold_x(const AnalyticParams& p);

/// First-order SLAP addressing width. Throws NotRealValued when
/// Omega_S0 T >= A sqrt((1 + R') / R').
double slap_fwhm(const AnalyticParams& p);

/// Width of the dark-state |1> population at one half, 2 w_s / sqrt(1 + sqrt(R')).
double cpt_fwhm(const AnalyticParams& p);

/// zeta(x) such that Omega_S0 T = A zeta(x) makes slap_fwhm equal x.
double window_zeta(double r_prime, double x, double w_s) noexcept;

/// Range of Omega_S0 T placing the SLAP width between dx_at and x1 - dx_at.
/// Feasible only if dx_at is above the narrowest real width w_s / sqrt(1 + R').
/// Throws InfeasibleGeometry when x1 <= dx_at.
SsaWindow ssa_window(const AnalyticParams& p, double x1, double dx_at);

/// Gaussian-model site probabilities and efficiency eta = p_x0 (1 - p_x1).
SiteProbabilities analytic_site_probs(double dx, double dx_at, double x1);

/// Addressing width for either technique.
double technique_fwhm(Technique technique, const AnalyticParams& p);

/// R whose technique width equals dx_target, by bisection on the monotone map
/// R -> width. Throws Unachievable when the target is out of range.
double required_r(double dx_target, Technique technique, const DesignParams& fixed);

}  // namespace slap
