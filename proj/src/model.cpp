#include "slap/model.hpp"

#include <cmath>

#include "slap/errors.hpp"

namespace slap {

namespace {

void require(bool ok, const char* path, const char* what) {
    if (!ok) throw ValidationError(path, what);
}

}  // namespace

double FieldSpec::ratio() const noexcept {
    const double q = omega_p0 / omega_s0;
    return q * q;
}

double FieldSpec::ratio_prime() const noexcept {
    const double q = w_s / w_p;
    return ratio() * q * q * q * q;
}

void FieldSpec::validate() const {
    require(std::isfinite(omega_p0) && omega_p0 >= 0.0, "field.omega_p0", "must be >= 0");
    require(std::isfinite(omega_s0) && omega_s0 > 0.0, "field.omega_s0", "must be > 0");
    require(std::isfinite(w_p) && w_p > 0.0, "field.w_p", "must be > 0");
    require(std::isfinite(w_s) && w_s > 0.0, "field.w_s", "must be > 0");
    require(std::isfinite(sigma) && sigma > 0.0, "field.sigma", "must be > 0");
    require(std::isfinite(t_p) && std::isfinite(t_s), "field.t_p", "pulse centres must be finite");
    require(std::isfinite(delta_p) && std::isfinite(delta_s), "field.delta_p", "detunings must be finite");
    require(std::isfinite(lambda_l) && lambda_l > 0.0, "field.lambda_l", "must be > 0");
}

void LatticeSpec::validate() const {
    require(std::isfinite(lambda) && lambda > 0.0, "lattice.lambda", "must be > 0");
    require(std::isfinite(v0_over_er) && v0_over_er > 0.0, "lattice.v0_er", "must be > 0");
    require(n_sites >= 1 && n_sites % 2 == 1, "lattice.n_sites", "must be a positive odd count");
}

void AtomSpec::validate() const {
    require(std::isfinite(mass) && mass > 0.0, "atom.mass", "must be > 0");
    require(std::isfinite(gamma21) && gamma21 >= 0.0, "atom.gamma21", "must be >= 0");
    require(std::isfinite(gamma23) && gamma23 >= 0.0, "atom.gamma23", "must be >= 0");
}

RabiPair field_amplitudes(double x, double t, const FieldSpec& f) noexcept {
    const double x2 = x * x;
    const double two_sigma2 = 2.0 * f.sigma * f.sigma;
    const double dtp = t - f.t_p;
    const double dts = t - f.t_s;
    // -expm1 keeps the node exact and accurate for |x| << w_p.
    const double node = -std::expm1(-x2 / (f.w_p * f.w_p));
    return {
        f.omega_p0 * node * std::exp(-dtp * dtp / two_sigma2),
        f.omega_s0 * std::exp(-x2 / (f.w_s * f.w_s)) * std::exp(-dts * dts / two_sigma2),
    };
}

DarkState dark_state(const RabiPair& rabi) {
    if (rabi.omega_p == 0.0 && rabi.omega_s == 0.0) {
        throw DegenerateFields("dark state undefined: both Rabi frequencies vanish");
    }
    const double theta = std::atan2(rabi.omega_p, rabi.omega_s);
    return {theta, std::cos(theta), -std::sin(theta)};
}

DarkState dark_state(double x, double t, const FieldSpec& f) {
    return dark_state(field_amplitudes(x, t, f));
}

TrapDerived derive_trap(const LatticeSpec& lat, const AtomSpec& atom) {
    lat.validate();
    atom.validate();
    using constants::hbar;
    const double k = constants::two_pi / lat.lambda;
    const double recoil = hbar * hbar * k * k / (2.0 * atom.mass);
    const double depth = lat.v0_over_er * recoil;

    TrapDerived trap;
    trap.omega_trap = k * std::sqrt(2.0 * depth / atom.mass);
    trap.w_at = std::sqrt(hbar / (atom.mass * trap.omega_trap));
    trap.dx_at = 2.0 * std::sqrt(std::numbers::ln2) * trap.w_at;
    return trap;
}

double site_density(double x, double center, const TrapDerived& trap) noexcept {
    const double u = (x - center) / trap.w_at;
    return std::exp(-u * u) / (trap.w_at * std::sqrt(std::numbers::pi));
}

double lattice_density(double x, const LatticeSpec& lat, const TrapDerived& trap) noexcept {
    double sum = 0.0;
    for (int n = -lat.half_span(); n <= lat.half_span(); ++n) {
        sum += site_density(x, lat.site_center(n), trap);
    }
    return sum;
}

}  // namespace slap
