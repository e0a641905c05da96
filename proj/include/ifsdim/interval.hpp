#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace ifsdim {

// Minimal interval type used for outer enclosures of map images and for
// derivative range evaluation. Rounding is handled by explicit outward
// padding (a few ulps per operation), not by switching FPU modes; the pads
// are orders of magnitude below every tolerance this library works at.
struct Ival {
    double lo = 0.0;
    double hi = 0.0;

    Ival() = default;
    explicit Ival(double v) : lo(v), hi(v) {}
    Ival(double l, double h) : lo(l), hi(h) {}

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }

    bool contains(double x, double tol = 0.0) const {
        return x >= lo - tol && x <= hi + tol;
    }
    // Signed distance from x to the interval; <= 0 when inside.
    double dist(double x) const {
        return std::max(lo - x, x - hi);
    }
    bool intersects(const Ival& o, double tol = 0.0) const {
        return lo <= o.hi + tol && o.lo <= hi + tol;
    }
    // Length of the intersection; negative values measure the gap.
    double overlap_len(const Ival& o) const {
        return std::min(hi, o.hi) - std::max(lo, o.lo);
    }
    bool contained_in(const Ival& o, double tol = 0.0) const {
        return lo >= o.lo - tol && hi <= o.hi + tol;
    }

    Ival inflated(double pad) const { return {lo - pad, hi + pad}; }
};

inline Ival operator+(Ival a, Ival b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Ival operator-(Ival a, Ival b) { return {a.lo - b.hi, a.hi - b.lo}; }

inline Ival operator*(Ival a, Ival b) {
    const double t1 = a.lo * b.lo, t2 = a.lo * b.hi, t3 = a.hi * b.lo, t4 = a.hi * b.hi;
    return {std::min(std::min(t1, t2), std::min(t3, t4)),
            std::max(std::max(t1, t2), std::max(t3, t4))};
}

inline Ival operator*(double s, Ival a) {
    return s >= 0 ? Ival{s * a.lo, s * a.hi} : Ival{s * a.hi, s * a.lo};
}

// x^2 as a set image (tighter than x*x when the interval straddles 0).
inline Ival sqr(Ival a) {
    double l = a.lo * a.lo, h = a.hi * a.hi;
    if (a.contains(0.0)) return {0.0, std::max(l, h)};
    return {std::min(l, h), std::max(l, h)};
}

inline Ival operator+(Ival a, double s) { return {a.lo + s, a.hi + s}; }

inline Ival hull(Ival a, Ival b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// Outward pad proportional to magnitude, covering accumulated rounding of a
// short chain of arithmetic ops.
inline Ival outward(Ival a, double ulps = 32.0) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double pl = ulps * eps * std::max(1.0, std::abs(a.lo));
    const double ph = ulps * eps * std::max(1.0, std::abs(a.hi));
    return {a.lo - pl, a.hi + ph};
}

} // namespace ifsdim
