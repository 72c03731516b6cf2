#pragma once

// Spatial sweeps of the survival probability and the addressing figures of
// merit derived from them.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slap/analytics.hpp"
#include "slap/dynamics.hpp"
#include "slap/model.hpp"

namespace slap {

struct SpatialGrid {
    double x_min = 0.0;  ///< m
    double x_max = 0.0;  ///< m
    int n_points = 0;

    /// Uniform grid over [-half_width, half_width].
    static SpatialGrid symmetric(double half_width, int n_points);

    double spacing() const noexcept { return (x_max - x_min) / (n_points - 1); }
    double x(int i) const noexcept;
    std::vector<double> points() const;

    /// n_points >= 3 and odd, x_min < x_max. A single-point grid at x_min ==
    /// x_max is also accepted so a lone site can be probed.
    void validate() const;
};

struct SurvivalProfile {
    SpatialGrid grid;
    std::vector<double> p11;
    Protocol protocol = Protocol::slap;
    std::string provenance;  ///< digest of the configuration that produced it
};

struct PointFailure {
    int index = 0;
    double x = 0.0;
    double time = 0.0;
    std::string message;
};

/// Scan that keeps going past failed points. Failed entries of p11 are NaN.
struct PartialScan {
    SurvivalProfile profile;
    std::vector<PointFailure> failures;
};

/// 0 selects std::thread::hardware_concurrency().
struct ParallelOptions {
    unsigned threads = 0;
};

PartialScan scan_survival_partial(const SpatialGrid& grid, Protocol protocol, const FieldSpec& f,
                                  const AtomSpec& atom, const IntegratorConfig& ic,
                                  ParallelOptions par = {});

/// Throws IntegrationFailure naming the first failing x (in grid order).
SurvivalProfile scan_survival(const SpatialGrid& grid, Protocol protocol, const FieldSpec& f,
                              const AtomSpec& atom, const IntegratorConfig& ic,
                              ParallelOptions par = {});

/// Lattice density at every grid point, 1/m.
std::vector<double> lattice_samples(const SpatialGrid& grid, const LatticeSpec& lat,
                                    const TrapDerived& trap);

/// rho_1(x_i) = p11(x_i) rho_lat(x_i), 1/m.
std::vector<double> final_distribution(const SurvivalProfile& profile, const LatticeSpec& lat,
                                       const TrapDerived& trap);

/// Full width between the half-maximum crossings of the central peak, with
/// the half level measured from the far-field floor. Throws NoPeak or
/// AmbiguousPeak.
double numeric_fwhm(const SurvivalProfile& profile);
double numeric_fwhm(const SpatialGrid& grid, std::span<const double> values);

/// Composite Simpson rule on an odd number of equally spaced samples.
double simpson(std::span<const double> y, double h);

/// Fraction of site i's atom left in |1>: ratio of the Simpson integrals of
/// rho_1 and rho_lat over [x_i - lambda/4, x_i + lambda/4]. Uses the grid
/// samples directly when the window edges fall on samples, otherwise
/// interpolates p11 linearly onto window_points nodes. Throws
/// WindowNotCovered.
double site_probability(int site, const SurvivalProfile& profile, const LatticeSpec& lat,
                        const TrapDerived& trap, int window_points = 101);

/// eta = p_x0 (1 - p_x1).
double efficiency(double p_x0, double p_x1);

struct AddressingReport {
    double r = 0.0;
    Protocol protocol = Protocol::slap;
    double dx_numeric = 0.0;  ///< m; NaN if no clean peak
    double p_x0 = 0.0;
    double p_x1 = 0.0;
    double eta_numeric = 0.0;
    double dx_analytic = 0.0;  ///< m; NaN if the closed form does not apply
    double p_x0_analytic = 0.0;
    double p_x1_analytic = 0.0;
    double eta_analytic = 0.0;
    int integration_failures = 0;  ///< grid points whose evolution failed
    std::vector<std::string> errors;

    bool ok() const noexcept { return errors.empty(); }
};

/// Numeric figures of merit of a profile alongside the closed-form estimates.
/// Errors in individual quantities are recorded in the report, not thrown.
AddressingReport addressing_report(const SurvivalProfile& profile, const LatticeSpec& lat,
                                   const TrapDerived& trap, const AnalyticParams& analytic);

/// Site probabilities with the grid doubled until both change by less than
/// tol. Returns the refined profile.
SurvivalProfile refine_profile(const SurvivalProfile& start, const FieldSpec& f, const AtomSpec& atom,
                               const LatticeSpec& lat, const TrapDerived& trap,
                               const IntegratorConfig& ic, double tol = 1e-3, int max_levels = 4,
                               ParallelOptions par = {});

struct SweepInputs {
    FieldSpec base;  ///< omega_p0 is replaced per row by omega_s0 sqrt(R)
    AtomSpec atom;
    LatticeSpec lattice;
    IntegratorConfig integrator;
    SpatialGrid grid;
    double a_const = 20.0;
    ParallelOptions parallel;
    std::vector<Protocol> protocols{Protocol::slap, Protocol::cpt};
};

/// One report per (R, protocol), R-major in input order. Failures are kept in
/// the row's error list and the sweep continues.
std::vector<AddressingReport> sweep_r(std::span<const double> values, const SweepInputs& in);

}  // namespace slap
