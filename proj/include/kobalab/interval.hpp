#pragma once

#include <algorithm>

namespace kobalab {

// Closed interval [lo, hi]. Only the handful of operations the Gromov
// product bookkeeping needs; endpoints are propagated conservatively.
struct Interval {
    double lo = 0;
    double hi = 0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

inline Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator-(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval operator*(double c, Interval a) {
    return c >= 0 ? Interval{c * a.lo, c * a.hi} : Interval{c * a.hi, c * a.lo};
}
inline Interval imin(Interval a, Interval b) {
    return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

}  // namespace kobalab
