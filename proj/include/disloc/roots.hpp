#pragma once

#include <cmath>

namespace disloc {

// Bisection on [lo, hi] with f(lo) f(hi) <= 0; stops at width tol or when the midpoint stops moving.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-12) {
    double flo = f(lo);
    if (flo == 0) return lo;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace disloc
