#pragma once

#include <cmath>
#include <stdexcept>

namespace slap {

struct BisectionTolerance {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_iter = 400;
};

/// Root of f on [lo, hi] by interval halving. f(lo) and f(hi) must differ in
/// sign (a zero at either end is returned as is). Stops once the bracket is
/// narrower than rel_tol * |midpoint| + abs_tol.
template <class Function>
double bisect(Function&& f, double lo, double hi, BisectionTolerance tol = {}) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo < 0.0) == (f_hi < 0.0)) {
        throw std::invalid_argument("bisect: interval does not bracket a root");
    }
    for (int i = 0; i < tol.max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= tol.rel_tol * std::abs(mid) + tol.abs_tol) return mid;
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace slap
