#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "slap/errors.hpp"
#include "slap/integrator.hpp"

using namespace slap;
using doctest::Approx;

TEST_CASE("exponential decay") {
    std::array<double, 1> y{1.0};
    integrate_dopri5([](double, const auto& s, auto& d) { d[0] = -3.0 * s[0]; }, y, 0.0, 2.0,
                     StepControl{.rel_tol = 1e-10, .abs_tol = 1e-14});
    CHECK(y[0] == Approx(std::exp(-6.0)).epsilon(1e-8));
}

TEST_CASE("harmonic oscillator over many periods") {
    std::array<double, 2> y{1.0, 0.0};
    const double t1 = 20.0 * std::numbers::pi;
    int calls = 0;
    double last_t = -1.0;
    bool monotone = true;
    integrate_dopri5(
        [](double, const auto& s, auto& d) {
            d[0] = s[1];
            d[1] = -s[0];
        },
        y, 0.0, t1, StepControl{.rel_tol = 1e-10, .abs_tol = 1e-12},
        [&](double t, const auto&) {
            monotone = monotone && t > last_t;
            last_t = t;
            ++calls;
        });
    CHECK(y[0] == Approx(1.0).epsilon(1e-7));
    CHECK(std::abs(y[1]) < 1e-7);
    CHECK(monotone);
    CHECK(last_t == t1);
    CHECK(calls > 10);
}

TEST_CASE("time-dependent right-hand side") {
    // dy/dt = cos t, y(0) = 0 -> sin t
    std::array<double, 1> y{0.0};
    integrate_dopri5([](double t, const auto&, auto& d) { d[0] = std::cos(t); }, y, 0.0, 1.3,
                     StepControl{.rel_tol = 1e-12, .abs_tol = 1e-14});
    CHECK(y[0] == Approx(std::sin(1.3)).epsilon(1e-11));
}

TEST_CASE("max_step caps the step") {
    std::array<double, 1> y{1.0};
    double prev = 0.0, widest = 0.0;
    integrate_dopri5([](double, const auto&, auto& d) { d[0] = 0.0; }, y, 0.0, 1.0,
                     StepControl{.max_step = 0.01}, [&](double t, const auto&) {
                         widest = std::max(widest, t - prev);
                         prev = t;
                     });
    CHECK(widest <= 0.01 + 1e-15);
}

TEST_CASE("failures report the time reached") {
    SUBCASE("step budget") {
        std::array<double, 1> y{1.0};
        try {
            integrate_dopri5([](double, const auto& s, auto& d) { d[0] = -s[0]; }, y, 0.0, 1.0,
                             StepControl{.max_step = 1e-3, .max_steps = 10});
            FAIL("expected IntegrationFailure");
        } catch (const IntegrationFailure& e) {
            CHECK(e.time() > 0.0);
            CHECK(e.time() < 1.0);
        }
    }
    SUBCASE("step underflow at a blow-up") {
        // y' = y^2 from y(0) = 1 diverges at t = 1.
        std::array<double, 1> y{1.0};
        try {
            integrate_dopri5([](double, const auto& s, auto& d) { d[0] = s[0] * s[0]; }, y, 0.0, 2.0,
                             StepControl{.rel_tol = 1e-8, .abs_tol = 1e-10, .min_step_fraction = 1e-10});
            FAIL("expected IntegrationFailure");
        } catch (const IntegrationFailure& e) {
            CHECK(e.time() == Approx(1.0).epsilon(1e-3));
        }
    }
}
