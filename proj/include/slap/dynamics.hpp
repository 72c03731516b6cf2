#pragma once

// Open-system evolution of a single Lambda atom at a fixed position.
//
// Basis order is (|1>, |2>, |3>). The Hamiltonian is taken in the rotating
// wave approximation,
//
//   H/hbar = -dp |2><2| - (dp - ds) |3><3|
//            + (Wp/2)(|2><1| + h.c.) + (Ws/2)(|2><3| + h.c.),
//
// and |2> decays to |1> at gamma21 and to |3> at gamma23. The ground states
// neither decay nor dephase.

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "slap/model.hpp"

namespace slap {

using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

class DensityMatrix {
public:
    /// |1><1|.
    DensityMatrix();
    explicit DensityMatrix(const Matrix3c& rho) : rho_(rho) {}

    static DensityMatrix pure(const Vector3c& psi);
    /// Projector on basis state 1, 2 or 3.
    static DensityMatrix level(int n);

    const Matrix3c& matrix() const noexcept { return rho_; }
    /// Population of basis state 1, 2 or 3.
    double population(int n) const { return rho_(n - 1, n - 1).real(); }
    std::complex<double> element(int row, int col) const { return rho_(row - 1, col - 1); }

    double trace() const noexcept { return rho_.trace().real(); }
    double purity() const { return (rho_ * rho_).trace().real(); }
    double min_eigenvalue() const;
    /// max |rho - rho^dagger|.
    double hermiticity_error() const;

    /// The nine real degrees of freedom: diagonal, then (re, im) of the
    /// 12, 13 and 23 coherences.
    std::array<double, 9> pack() const noexcept;
    static DensityMatrix unpack(const std::array<double, 9>& y) noexcept;

private:
    Matrix3c rho_;
};

enum class Protocol {
    slap,  ///< Stokes first, pump delayed by T > 0
    cpt,   ///< coincident pulses
};

const char* to_string(Protocol p) noexcept;

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.0;  ///< s; 0 selects sigma / 10
    long max_steps = 10'000'000;

    void validate() const;
};

struct TimeWindow {
    double start = 0.0;
    double end = 0.0;
};

/// Field timing actually applied for a protocol: CPT collapses the pump onto
/// the Stokes centre.
FieldSpec schedule(Protocol protocol, const FieldSpec& f);

/// [min(t_p, t_s) - 2 sigma, max(t_p, t_s) + 2 sigma].
TimeWindow integration_window(const FieldSpec& scheduled) noexcept;

/// H / hbar in rad/s.
Matrix3c hamiltonian(const RabiPair& rabi, double delta_p, double delta_s);

/// d rho / dt in 1/s.
Matrix3c liouvillian_rhs(const Matrix3c& rho, const RabiPair& rabi, double delta_p, double delta_s,
                         const AtomSpec& atom);

using StepObserver = std::function<void(double t, const DensityMatrix& rho)>;

/// Evolves rho = |1><1| across the protocol window and returns rho(t_end).
/// observer, when set, sees the initial state and every accepted step.
DensityMatrix evolve_site(double x, Protocol protocol, const FieldSpec& f, const AtomSpec& atom,
                          const IntegratorConfig& ic, const StepObserver& observer = {});

/// rho_11 at the end of the protocol.
double survival_probability(double x, Protocol protocol, const FieldSpec& f, const AtomSpec& atom,
                            const IntegratorConfig& ic);

/// Stationary state of the Liouvillian for constant fields, normalised to unit
/// trace. Throws slap::Error when the stationary state is not unique.
DensityMatrix steady_state(const RabiPair& rabi, double delta_p, double delta_s, const AtomSpec& atom);

}  // namespace slap
