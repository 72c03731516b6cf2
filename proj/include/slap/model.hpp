#pragma once

// Physical parameters of a Lambda atom in a 1D optical lattice illuminated by
// a pump pulse with a central node and a Gaussian Stokes pulse. All values are
// SI: metres, seconds, rad/s, kilograms.

#include <numbers>

namespace slap {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double rb87_mass_amu = 86.909180527;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Pump/Stokes pulse pair. The pump carries a node of half-width w_p at x = 0;
/// the Stokes beam is a Gaussian of half-width w_s centred on the same point.
struct FieldSpec {
    double omega_p0 = 0.0;  ///< peak pump Rabi frequency, rad/s
    double omega_s0 = 0.0;  ///< peak Stokes Rabi frequency, rad/s
    double w_p = 0.0;       ///< pump node 1/e half-width, m
    double w_s = 0.0;       ///< Stokes 1/e half-width, m
    double t_p = 0.0;       ///< pump temporal centre, s
    double t_s = 0.0;       ///< Stokes temporal centre, s
    double sigma = 0.0;     ///< temporal width, s
    double delta_p = 0.0;   ///< pump single-photon detuning, rad/s
    double delta_s = 0.0;   ///< Stokes single-photon detuning, rad/s
    double lambda_l = 0.0;  ///< addressing-light wavelength, m

    /// Pulse delay T = t_p - t_s; positive for the counterintuitive order.
    double delay() const noexcept { return t_p - t_s; }
    /// R = (omega_p0 / omega_s0)^2.
    double ratio() const noexcept;
    /// R' = R (w_s / w_p)^4.
    double ratio_prime() const noexcept;

    /// Throws ValidationError (path "field.<name>") on a broken invariant.
    void validate() const;
};

struct LatticeSpec {
    double lambda = 0.0;      ///< lattice-laser wavelength, m
    double v0_over_er = 0.0;  ///< depth in recoil energies
    int n_sites = 5;          ///< odd, centred on the target site at x = 0

    /// Nearest-neighbour distance lambda / 2.
    double spacing() const noexcept { return 0.5 * lambda; }
    double site_center(int n) const noexcept { return n * spacing(); }
    int half_span() const noexcept { return n_sites / 2; }

    void validate() const;
};

struct AtomSpec {
    double mass = constants::rb87_mass_amu * constants::atomic_mass_unit;  ///< kg
    double gamma21 = 0.0;  ///< |2> -> |1> spontaneous rate, rad/s
    double gamma23 = 0.0;  ///< |2> -> |3> spontaneous rate, rad/s

    void validate() const;
};

/// Harmonic approximation of one lattice well.
struct TrapDerived {
    double omega_trap = 0.0;  ///< rad/s
    double w_at = 0.0;        ///< ground-state width sqrt(hbar / m omega), m
    double dx_at = 0.0;       ///< FWHM of the site density 2 sqrt(ln 2) w_at, m
};

struct RabiPair {
    double omega_p = 0.0;
    double omega_s = 0.0;
};

struct DarkState {
    double theta = 0.0;  ///< mixing angle, atan(omega_p / omega_s)
    double c1 = 1.0;     ///< amplitude on |1>, cos(theta)
    double c3 = 0.0;     ///< amplitude on |3>, -sin(theta)
};

/// Rabi frequencies at position x (m) and time t (s).
RabiPair field_amplitudes(double x, double t, const FieldSpec& f) noexcept;

/// Dark state cos(theta)|1> - sin(theta)|3>. Throws DegenerateFields when both
/// Rabi frequencies vanish at (x, t).
DarkState dark_state(double x, double t, const FieldSpec& f);
DarkState dark_state(const RabiPair& rabi);

/// omega = k sqrt(2 V0 / m), the harmonic expansion of V0 sin^2(kx).
TrapDerived derive_trap(const LatticeSpec& lat, const AtomSpec& atom);

/// Sum of unit-normalised Gaussians of width w_at at every site, in 1/m.
double lattice_density(double x, const LatticeSpec& lat, const TrapDerived& trap) noexcept;

/// Single-site term of lattice_density.
double site_density(double x, double center, const TrapDerived& trap) noexcept;

}  // namespace slap
