#include "slap/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "slap/errors.hpp"
#include "slap/integrator.hpp"

namespace slap {

namespace {

using Real9 = std::array<double, 9>;

constexpr double kSurvivalSlack = 1e-6;

}  // namespace

DensityMatrix::DensityMatrix() : rho_(Matrix3c::Zero()) { rho_(0, 0) = 1.0; }

DensityMatrix DensityMatrix::pure(const Vector3c& psi) {
    return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::level(int n) {
    Matrix3c m = Matrix3c::Zero();
    m(n - 1, n - 1) = 1.0;
    return DensityMatrix(m);
}

double DensityMatrix::min_eigenvalue() const {
    const Matrix3c herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix3c> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::hermiticity_error() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

Real9 DensityMatrix::pack() const noexcept {
    return {rho_(0, 0).real(), rho_(1, 1).real(), rho_(2, 2).real(),
            rho_(0, 1).real(), rho_(0, 1).imag(), rho_(0, 2).real(),
            rho_(0, 2).imag(), rho_(1, 2).real(), rho_(1, 2).imag()};
}

DensityMatrix DensityMatrix::unpack(const Real9& y) noexcept {
    using C = std::complex<double>;
    Matrix3c m;
    m(0, 0) = y[0];
    m(1, 1) = y[1];
    m(2, 2) = y[2];
    m(0, 1) = C(y[3], y[4]);
    m(1, 0) = C(y[3], -y[4]);
    m(0, 2) = C(y[5], y[6]);
    m(2, 0) = C(y[5], -y[6]);
    m(1, 2) = C(y[7], y[8]);
    m(2, 1) = C(y[7], -y[8]);
    return DensityMatrix(m);
}

const char* to_string(Protocol p) noexcept { return p == Protocol::slap ? "slap" : "cpt"; }

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0)) throw ValidationError("integrator.rel_tol", "must be > 0");
    if (!(abs_tol > 0.0)) throw ValidationError("integrator.abs_tol", "must be > 0");
    if (!(max_step >= 0.0)) throw ValidationError("integrator.max_step_us", "must be >= 0");
    if (max_steps <= 0) throw ValidationError("integrator.max_steps", "must be > 0");
}

FieldSpec schedule(Protocol protocol, const FieldSpec& f) {
    FieldSpec out = f;
    if (protocol == Protocol::cpt) {
        out.t_p = f.t_s;
    } else if (!(f.delay() > 0.0)) {
        throw ValidationError("field.t_p", "SLAP needs the pump delayed after the Stokes pulse (T > 0)");
    }
    return out;
}

TimeWindow integration_window(const FieldSpec& scheduled) noexcept {
    return {std::min(scheduled.t_p, scheduled.t_s) - 2.0 * scheduled.sigma,
            std::max(scheduled.t_p, scheduled.t_s) + 2.0 * scheduled.sigma};
}

Matrix3c hamiltonian(const RabiPair& rabi, double delta_p, double delta_s) {
    Matrix3c h = Matrix3c::Zero();
    h(1, 1) = -delta_p;
    h(2, 2) = -(delta_p - delta_s);
    h(0, 1) = h(1, 0) = 0.5 * rabi.omega_p;
    h(1, 2) = h(2, 1) = 0.5 * rabi.omega_s;
    return h;
}

Matrix3c liouvillian_rhs(const Matrix3c& rho, const RabiPair& rabi, double delta_p, double delta_s,
                         const AtomSpec& atom) {
    static const std::complex<double> minus_i(0.0, -1.0);
    const Matrix3c h = hamiltonian(rabi, delta_p, delta_s);
    Matrix3c d = minus_i * (h * rho - rho * h);

    const double gamma = atom.gamma21 + atom.gamma23;
    const std::complex<double> p22 = rho(1, 1);
    d(0, 0) += atom.gamma21 * p22;
    d(2, 2) += atom.gamma23 * p22;
    // -(gamma/2){|2><2|, rho}
    d(1, 1) -= gamma * p22;
    d(1, 0) -= 0.5 * gamma * rho(1, 0);
    d(0, 1) -= 0.5 * gamma * rho(0, 1);
    d(1, 2) -= 0.5 * gamma * rho(1, 2);
    d(2, 1) -= 0.5 * gamma * rho(2, 1);
    return d;
}

DensityMatrix evolve_site(double x, Protocol protocol, const FieldSpec& f, const AtomSpec& atom,
                          const IntegratorConfig& ic, const StepObserver& observer) {
    f.validate();
    atom.validate();
    ic.validate();
    const FieldSpec sched = schedule(protocol, f);
    const TimeWindow window = integration_window(sched);

    StepControl ctl;
    ctl.rel_tol = ic.rel_tol;
    ctl.abs_tol = ic.abs_tol;
    ctl.max_step = ic.max_step > 0.0 ? ic.max_step : 0.1 * sched.sigma;
    ctl.max_steps = ic.max_steps;

    auto rhs = [&](double t, const Real9& y, Real9& dy) {
        const Matrix3c d = liouvillian_rhs(DensityMatrix::unpack(y).matrix(),
                                           field_amplitudes(x, t, sched), sched.delta_p,
                                           sched.delta_s, atom);
        dy = DensityMatrix(d).pack();
    };

    Real9 y = DensityMatrix().pack();
    if (observer) {
        integrate_dopri5(rhs, y, window.start, window.end, ctl,
                         [&](double t, const Real9& s) { observer(t, DensityMatrix::unpack(s)); });
    } else {
        integrate_dopri5(rhs, y, window.start, window.end, ctl);
    }
    return DensityMatrix::unpack(y);
}

double survival_probability(double x, Protocol protocol, const FieldSpec& f, const AtomSpec& atom,
                            const IntegratorConfig& ic) {
    const double p = evolve_site(x, protocol, f, atom, ic).population(1);
    if (p < -kSurvivalSlack || p > 1.0 + kSurvivalSlack) {
        const double t_end = integration_window(schedule(protocol, f)).end;
        throw IntegrationFailure(
            fmt::format("survival probability {:.9g} at x = {:.6g} m left [0, 1] beyond tolerance", p, x),
            t_end);
    }
    return std::clamp(p, 0.0, 1.0);
}

DensityMatrix steady_state(const RabiPair& rabi, double delta_p, double delta_s, const AtomSpec& atom) {
    // The Liouvillian is real-linear on the nine Hermitian degrees of freedom.
    Eigen::Matrix<double, 9, 9> liouvillian;
    for (int k = 0; k < 9; ++k) {
        Real9 e{};
        e[k] = 1.0;
        const Matrix3c d = liouvillian_rhs(DensityMatrix::unpack(e).matrix(), rabi, delta_p, delta_s, atom);
        const Real9 col = DensityMatrix(d).pack();
        for (int i = 0; i < 9; ++i) liouvillian(i, k) = col[i];
    }
    // Trace is conserved, so one row is redundant; swap it for normalisation.
    Eigen::Matrix<double, 9, 9> system = liouvillian;
    system.row(0).setZero();
    system(0, 0) = system(0, 1) = system(0, 2) = 1.0;
    Eigen::Matrix<double, 9, 1> rhs = Eigen::Matrix<double, 9, 1>::Zero();
    rhs(0) = 1.0;

    Eigen::FullPivLU<Eigen::Matrix<double, 9, 9>> lu(system);
    if (!lu.isInvertible()) throw Error("steady state is not unique for these fields");
    const Eigen::Matrix<double, 9, 1> sol = lu.solve(rhs);
    Real9 y;
    for (int i = 0; i < 9; ++i) y[i] = sol(i);
    return DensityMatrix::unpack(y);
}

}  // namespace slap
