#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small fixed-size real systems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include <fmt/format.h>

#include "slap/errors.hpp"

namespace slap {

struct StepControl {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.0;       ///< 0: no cap beyond the interval length
    double initial_step = 0.0;   ///< 0: 1e-4 of the interval
    double min_step_fraction = 1e-14;  ///< underflow threshold relative to the interval
    long max_steps = 10'000'000;
};

/// Integrates dy/dt = rhs(t, y) from t0 to t1 in place. observer(t, y) is
/// invoked at t0 and after every accepted step. Throws IntegrationFailure
/// with the time at which the step size underflowed or the step budget ran
/// out.
template <std::size_t N, class Rhs, class Observer>
void integrate_dopri5(Rhs&& rhs, std::array<double, N>& y, double t0, double t1,
                      const StepControl& ctl, Observer&& observer) {
    using State = std::array<double, N>;

    // Butcher tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    // Difference between the 5th- and embedded 4th-order weights.
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double span = t1 - t0;
    double h = ctl.initial_step > 0.0 ? ctl.initial_step : 1e-4 * span;
    const double h_max = ctl.max_step > 0.0 ? std::min(ctl.max_step, span) : span;
    const double h_min = ctl.min_step_fraction * span;
    h = std::min(h, h_max);

    State k1, k2, k3, k4, k5, k6, k7, tmp, y_new;
    double t = t0;
    rhs(t, y, k1);
    observer(t, y);

    long steps = 0;
    while (t < t1) {
        if (++steps > ctl.max_steps) {
            throw IntegrationFailure(fmt::format("step budget of {} exhausted at t = {:.9g} s",
                                                 ctl.max_steps, t),
                                     t);
        }
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, tmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, y_new, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                  e7 * k7[i]);
            const double scale =
                ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += (e / scale) * (e / scale);
        }
        err = std::sqrt(err / static_cast<double>(N));

        if (err <= 1.0) {
            t = last ? t1 : t + h;
            y = y_new;
            k1 = k7;  // first-same-as-last
            observer(t, y);
            const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h = std::min(h * grow, h_max);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
            if (h < h_min) {
                throw IntegrationFailure(
                    fmt::format("step size underflow ({:.3g} s) at t = {:.9g} s", h, t), t);
            }
        }
    }
}

template <std::size_t N, class Rhs>
void integrate_dopri5(Rhs&& rhs, std::array<double, N>& y, double t0, double t1,
                      const StepControl& ctl) {
    integrate_dopri5(std::forward<Rhs>(rhs), y, t0, t1, ctl, [](double, const auto&) {});
}

}  // namespace slap
