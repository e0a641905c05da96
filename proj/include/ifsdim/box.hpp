#pragma once

#include <cmath>
#include <complex>

#include "ifsdim/interval.hpp"

namespace ifsdim {

using Point = std::complex<double>;

// Axis-aligned box, the enclosure primitive. 1-D enclosures carry a
// degenerate [0,0] second coordinate.
struct Box {
    Ival x;
    Ival y;

    Box() = default;
    Box(Ival ix, Ival iy) : x(ix), y(iy) {}
    static Box interval(double lo, double hi) { return {Ival{lo, hi}, Ival{0.0, 0.0}}; }

    bool contains(Point p, double tol = 0.0) const {
        return x.contains(p.real(), tol) && y.contains(p.imag(), tol);
    }
    bool contained_in(const Box& o, double tol = 0.0) const {
        return x.contained_in(o.x, tol) && y.contained_in(o.y, tol);
    }
    bool intersects(const Box& o, double tol = 0.0) const {
        return x.intersects(o.x, tol) && y.intersects(o.y, tol);
    }
    Box inflated(double pad) const { return {x.inflated(pad), y.inflated(pad)}; }

    double diam() const { return std::hypot(x.width(), y.width()); }
    Point center() const { return {x.mid(), y.mid()}; }

    // Chebyshev distance from p to the box, <= 0 inside.
    double dist(Point p) const {
        return std::max(x.dist(p.real()), y.dist(p.imag()));
    }
};

inline Box hull(const Box& a, const Box& b) {
    return {hull(a.x, b.x), hull(a.y, b.y)};
}

// Modulus range of z over a box.
inline Ival box_mod_range(const Box& b) {
    const double ax_lo = std::max(0.0, std::max(b.x.lo, -b.x.hi));
    const double ay_lo = std::max(0.0, std::max(b.y.lo, -b.y.hi));
    const double ax_hi = std::max(std::abs(b.x.lo), std::abs(b.x.hi));
    const double ay_hi = std::max(std::abs(b.y.lo), std::abs(b.y.hi));
    return {std::hypot(ax_lo, ay_lo), std::hypot(ax_hi, ay_hi)};
}

} // namespace ifsdim
