#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ifsdim/box.hpp"
#include "ifsdim/interval.hpp"

namespace ifsdim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Argument of z normalized to [0, 2pi). The d-th-root branch cut sits at 0.
inline double arg2pi(Point z) {
    double a = std::atan2(z.imag(), z.real());
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

namespace detail {

// Annular sector r in [r.lo, r.hi], angle in [a_lo, a_hi] (no wrap inside).
struct Sector {
    Ival r;
    double a_lo;
    double a_hi;
};

inline Ival cos_range(double a, double b) {
    double lo = std::min(std::cos(a), std::cos(b));
    double hi = std::max(std::cos(a), std::cos(b));
    double k = std::ceil(a / std::numbers::pi);
    for (double c = k * std::numbers::pi; c <= b + 1e-15; c += std::numbers::pi, k += 1.0) {
        if (std::fmod(std::fabs(k), 2.0) < 0.5) hi = 1.0; else lo = -1.0;
    }
    return {lo, hi};
}

inline Box sector_to_box(const Sector& s) {
    Ival cr = cos_range(s.a_lo, s.a_hi);
    Ival sr = cos_range(s.a_lo - 0.5 * std::numbers::pi, s.a_hi - 0.5 * std::numbers::pi);
    return {outward(s.r * cr), outward(s.r * sr)};
}

// Minimal arc of corner directions of a box that avoids the origin.
// Returns {start in [0,2pi), width}; width < pi for such boxes.
struct Arc {
    double start;
    double width;
    bool full;
};

inline Arc covering_arc(std::vector<double>& ang) {
    if (ang.empty()) return {0.0, kTwoPi, true};
    std::sort(ang.begin(), ang.end());
    double max_gap = kTwoPi - ang.back() + ang.front();
    std::size_t gap_at = ang.size() - 1;
    for (std::size_t i = 0; i + 1 < ang.size(); ++i) {
        double g = ang[i + 1] - ang[i];
        if (g > max_gap) { max_gap = g; gap_at = i; }
    }
    double start = gap_at + 1 == ang.size() ? ang.front() : ang[gap_at + 1];
    return {start, kTwoPi - max_gap, false};
}

// Angular hull of {z in b : |z| >= rho}. For boxes avoiding the origin the
// corner directions suffice (theta is monotone along any non-radial edge);
// otherwise the extremes sit at corners or edge/circle intersections, unless
// the box swallows the inner circle entirely (then every direction occurs).
inline Arc box_arg_arc(const Box& b, double rho = 0.0) {
    std::vector<double> ang;
    ang.reserve(12);
    if (!(b.x.contains(0.0) && b.y.contains(0.0))) {
        ang = {arg2pi({b.x.lo, b.y.lo}), arg2pi({b.x.lo, b.y.hi}),
               arg2pi({b.x.hi, b.y.lo}), arg2pi({b.x.hi, b.y.hi})};
        return covering_arc(ang);
    }
    if (rho <= 0.0) return {0.0, kTwoPi, true};
    if (b.x.lo <= -rho && b.x.hi >= rho && b.y.lo <= -rho && b.y.hi >= rho)
        return {0.0, kTwoPi, true};
    const double r2 = rho * rho;
    auto corner = [&](double x, double y) {
        if (x * x + y * y >= r2 * (1.0 - 1e-12)) ang.push_back(arg2pi({x, y}));
    };
    corner(b.x.lo, b.y.lo);
    corner(b.x.lo, b.y.hi);
    corner(b.x.hi, b.y.lo);
    corner(b.x.hi, b.y.hi);
    auto vertical = [&](double x) {
        double d = r2 - x * x;
        if (d < 0.0) return;
        double y = std::sqrt(d);
        if (b.y.contains(y)) ang.push_back(arg2pi({x, y}));
        if (b.y.contains(-y)) ang.push_back(arg2pi({x, -y}));
    };
    auto horizontal = [&](double y) {
        double d = r2 - y * y;
        if (d < 0.0) return;
        double x = std::sqrt(d);
        if (b.x.contains(x)) ang.push_back(arg2pi({x, y}));
        if (b.x.contains(-x)) ang.push_back(arg2pi({-x, y}));
    };
    vertical(b.x.lo);
    vertical(b.x.hi);
    horizontal(b.y.lo);
    horizontal(b.y.hi);
    if (ang.empty()) return {0.0, kTwoPi, true};
    Arc arc = covering_arc(ang);
    // Tiny angular slack for the rounding of the intersection points.
    double pad = 1e-9;
    arc.start -= pad;
    arc.width = std::min(arc.width + 2.0 * pad, kTwoPi);
    if (arc.start < 0.0) arc.start += kTwoPi;
    return arc;
}

} // namespace detail

struct AffineMap1D {
    double a;
    double b;
};

// F(x) = lambda*x + eps*x^2 + eps*x^3 + offset, monotone on its domain.
struct CubicMap1D {
    double lambda;
    double eps;
    double offset;
};

// Inverse branch of R(z) = gamma*z^d + eps_1*z^(d-1) + ... + eps_{d-1}*z + c,
// selected by branch index k: the d-th root angle is (theta + 2*pi*k)/d with
// theta taken in [0, 2pi). Each branch is single-valued and injective on the
// annulus; it is discontinuous across the theta = 0 cut, which enclosure
// evaluation handles by splitting.
struct JuliaBranchMap {
    int degree;
    std::complex<double> gamma;
    std::complex<double> c;
    std::vector<std::complex<double>> eps; // coefficients of z^(d-1) .. z^1
    int branch;
};

class ConformalMap {
public:
    enum class Kind { Affine1D, Cubic1D, JuliaBranch };

    ConformalMap(AffineMap1D m, Box domain)
        : impl_(m), domain_(domain) {}
    ConformalMap(CubicMap1D m, Box domain)
        : impl_(m), domain_(domain) {}
    ConformalMap(JuliaBranchMap m, double r_lo, double r_hi)
        : impl_(std::move(m)),
          domain_{Ival{-r_hi, r_hi}, Ival{-r_hi, r_hi}},
          r_lo_(r_lo), r_hi_(r_hi) {}

    Kind kind() const {
        if (std::holds_alternative<AffineMap1D>(impl_)) return Kind::Affine1D;
        if (std::holds_alternative<CubicMap1D>(impl_)) return Kind::Cubic1D;
        return Kind::JuliaBranch;
    }

    const AffineMap1D& affine() const { return std::get<AffineMap1D>(impl_); }
    const CubicMap1D& cubic() const { return std::get<CubicMap1D>(impl_); }
    const JuliaBranchMap& julia() const { return std::get<JuliaBranchMap>(impl_); }

    const Box& domain() const { return domain_; }
    double annulus_lo() const { return r_lo_; }
    double annulus_hi() const { return r_hi_; }

    Point apply(Point p) const {
        if (const auto* m = std::get_if<AffineMap1D>(&impl_))
            return {m->a * p.real() + m->b, 0.0};
        if (const auto* m = std::get_if<CubicMap1D>(&impl_))
            return {cubic_eval(*m, p.real()), 0.0};
        return julia_apply(p);
    }

    double deriv_mod(Point p) const {
        if (const auto* m = std::get_if<AffineMap1D>(&impl_))
            return std::abs(m->a);
        if (const auto* m = std::get_if<CubicMap1D>(&impl_))
            return std::abs(cubic_deriv(*m, p.real()));
        const auto& j = std::get<JuliaBranchMap>(impl_);
        return 1.0 / std::abs(rational_deriv(j, julia_apply(p)));
    }

    // Preimage under this map. For branch maps this is just the forward
    // rational map. No domain check: callers probing preimages rely on
    // out-of-domain results escaping the seed set.
    Point inverse(Point p) const {
        if (const auto* m = std::get_if<AffineMap1D>(&impl_))
            return {(p.real() - m->b) / m->a, 0.0};
        if (const auto* m = std::get_if<CubicMap1D>(&impl_))
            return {cubic_inverse(*m, p.real()), 0.0};
        return rational_eval(std::get<JuliaBranchMap>(impl_), p);
    }

    // Outer enclosure of the image of a box.
    Box image_box(const Box& in) const {
        if (const auto* m = std::get_if<AffineMap1D>(&impl_)) {
            Ival ix = outward(m->a * in.x + m->b);
            return {ix, Ival{0.0, 0.0}};
        }
        if (const auto* m = std::get_if<CubicMap1D>(&impl_)) {
            // Monotone increasing on (inflated) domain; checked at validation.
            double lo = cubic_eval(*m, in.x.lo), hi = cubic_eval(*m, in.x.hi);
            return {outward(Ival{std::min(lo, hi), std::max(lo, hi)}), Ival{0.0, 0.0}};
        }
        return julia_image_box(in);
    }

    // Range of |phi'| over the map's domain inflated by inflate_rel*diam.
    Ival deriv_mod_range(double inflate_rel = 0.0) const {
        if (const auto* m = std::get_if<AffineMap1D>(&impl_))
            return {std::abs(m->a), std::abs(m->a)};
        if (const auto* m = std::get_if<CubicMap1D>(&impl_)) {
            Ival x = domain_.x.inflated(inflate_rel * domain_.x.width());
            Ival d = outward(Ival{m->lambda} + 2.0 * m->eps * x + 3.0 * m->eps * sqr(x));
            return {std::min(std::abs(d.lo), std::abs(d.hi)),
                    std::max(std::abs(d.lo), std::abs(d.hi))};
        }
        return julia_deriv_range(inflate_rel);
    }

    // Range of the signed 1-D derivative (injectivity check).
    Ival deriv_signed_range(double inflate_rel = 0.0) const {
        if (const auto* m = std::get_if<AffineMap1D>(&impl_))
            return {m->a, m->a};
        const auto& m = std::get<CubicMap1D>(impl_);
        Ival x = domain_.x.inflated(inflate_rel * domain_.x.width());
        return outward(Ival{m.lambda} + 2.0 * m.eps * x + 3.0 * m.eps * sqr(x));
    }

    bool is_affine() const { return kind() == Kind::Affine1D; }
    bool is_planar() const { return kind() == Kind::JuliaBranch; }

private:
    static double cubic_eval(const CubicMap1D& m, double x) {
        return ((m.eps * x + m.eps) * x + m.lambda) * x + m.offset;
    }
    static double cubic_deriv(const CubicMap1D& m, double x) {
        return (3.0 * m.eps * x + 2.0 * m.eps) * x + m.lambda;
    }

    double cubic_inverse(const CubicMap1D& m, double y) const {
        const double w = domain_.x.width();
        const double lo = domain_.x.lo - 2.0 * w, hi = domain_.x.hi + 2.0 * w;
        const double flo = cubic_eval(m, lo), fhi = cubic_eval(m, hi);
        // Linear escape outside the bracket; lands far outside the seed,
        // which is all pruning needs.
        if (y <= flo) return lo - (flo - y) / m.lambda;
        if (y >= fhi) return hi + (y - fhi) / m.lambda;
        double a = lo, b = hi, x = (y - m.offset) / m.lambda;
        if (x < a || x > b) x = 0.5 * (a + b);
        for (int it = 0; it < 80; ++it) {
            double f = cubic_eval(m, x) - y;
            if (f > 0) b = x; else a = x;
            double d = cubic_deriv(m, x);
            double step = f / d;
            double nx = x - step;
            if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
            if (std::abs(nx - x) <= 1e-16 * (1.0 + std::abs(x))) { x = nx; break; }
            x = nx;
        }
        return x;
    }

    static std::complex<double> rational_eval(const JuliaBranchMap& j, std::complex<double> z) {
        std::complex<double> acc = j.gamma;
        for (const auto& e : j.eps) acc = acc * z + e;
        for (int i = static_cast<int>(j.eps.size()) + 1; i < j.degree; ++i) acc *= z;
        return acc * z + j.c;
    }

    static std::complex<double> rational_deriv(const JuliaBranchMap& j, std::complex<double> z) {
        // d/dz of gamma z^d + eps_1 z^(d-1) + ... + eps_{d-1} z + c
        std::complex<double> acc = static_cast<double>(j.degree) * j.gamma;
        int pow = j.degree - 1;
        for (std::size_t i = 0; i < j.eps.size(); ++i) {
            acc = acc * z + static_cast<double>(pow) * j.eps[i];
            --pow;
        }
        while (pow > 0) { acc *= z; --pow; }
        return acc;
    }

    Point julia_apply(Point w) const {
        const auto& j = std::get<JuliaBranchMap>(impl_);
        std::complex<double> u = (w - j.c) / j.gamma;
        double r = std::pow(std::abs(u), 1.0 / j.degree);
        double th = (arg2pi(u) + kTwoPi * j.branch) / j.degree;
        std::complex<double> z = std::polar(r, th);
        if (!j.eps.empty()) {
            for (int it = 0; it < 60; ++it) {
                std::complex<double> f = rational_eval(j, z) - w;
                std::complex<double> d = rational_deriv(j, z);
                std::complex<double> nz = z - f / d;
                if (std::abs(nz - z) <= 1e-15 * (1.0 + std::abs(z))) { z = nz; break; }
                z = nz;
            }
            if (std::abs(rational_eval(j, z) - w) > 1e-9)
                throw std::runtime_error("inverse-branch refinement did not converge");
        }
        return z;
    }

    double julia_eps_bound(double rho_max) const {
        const auto& j = std::get<JuliaBranchMap>(impl_);
        double e = 0.0;
        double p = rho_max;
        for (std::size_t i = j.eps.size(); i-- > 0;) {
            e += std::abs(j.eps[i]) * p; // eps_{d-1} z^1 first
            p *= rho_max;
        }
        return e;
    }

    Box julia_image_box(const Box& in) const {
        const auto& j = std::get<JuliaBranchMap>(impl_);
        // u = (w - c)/gamma via complex interval arithmetic on the box.
        Ival ux = in.x - Ival{j.c.real()};
        Ival uy = in.y - Ival{j.c.imag()};
        const double g2 = std::norm(j.gamma);
        Ival vx = outward((j.gamma.real() / g2) * ux + (j.gamma.imag() / g2) * uy);
        Ival vy = outward((j.gamma.real() / g2) * uy - (j.gamma.imag() / g2) * ux);
        Box u{vx, vy};

        Ival mod = box_mod_range(u);
        double eps_slack = 0.0;
        if (!j.eps.empty()) {
            double rho_max = std::pow(mod.hi * 1.5 + 1e-12, 1.0 / j.degree);
            eps_slack = julia_eps_bound(rho_max) / std::abs(j.gamma);
            u = u.inflated(eps_slack);
            mod = box_mod_range(u);
        }
        // The true content lies in the annulus, so |u| is bounded away from 0
        // regardless of how loose the box hull is. Clamping keeps the sector
        // enclosures shrinking even when a hull touches the origin.
        const double ag = std::abs(j.gamma), ac = std::abs(j.c);
        const double ann_lo =
            std::max(0.0, (r_lo_ - ac) / ag - eps_slack) * (1.0 - 1e-12);
        const double ann_hi = ((r_hi_ + ac) / ag + eps_slack) * (1.0 + 1e-12);
        mod.lo = std::max(mod.lo, ann_lo);
        mod.hi = std::min(mod.hi, ann_hi);
        if (mod.lo > mod.hi) mod.lo = mod.hi;
        Ival root_r = outward(Ival{std::pow(mod.lo, 1.0 / j.degree),
                                   std::pow(mod.hi, 1.0 / j.degree)}, 64.0);

        detail::Arc arc = detail::box_arg_arc(u, mod.lo);
        const double k_off = kTwoPi * j.branch;
        Box out{};
        bool first = true;
        auto add_sector = [&](double a, double b) {
            detail::Sector s{root_r, (a + k_off) / j.degree, (b + k_off) / j.degree};
            Box sb = detail::sector_to_box(s);
            out = first ? sb : hull(out, sb);
            first = false;
        };
        if (arc.full) {
            add_sector(0.0, kTwoPi);
        } else {
            double s = arc.start, e = arc.start + arc.width;
            if (e <= kTwoPi) {
                add_sector(s, e);
            } else {
                add_sector(s, kTwoPi);
                add_sector(0.0, e - kTwoPi);
            }
        }
        return out.inflated(1e-14 * (1.0 + std::abs(root_r.hi)));
    }

    Ival julia_deriv_range(double inflate_rel) const {
        const auto& j = std::get<JuliaBranchMap>(impl_);
        const double pad = inflate_rel * 2.0 * r_hi_;
        const double w_lo = std::max(1e-12, r_lo_ - pad), w_hi = r_hi_ + pad;
        const double ac = std::abs(j.c), ag = std::abs(j.gamma);
        // |z| range of the branch image, with one refinement pass for the
        // lower-order perturbation.
        double rho_hi = std::pow((w_hi + ac) / ag, 1.0 / j.degree);
        double e = julia_eps_bound(rho_hi * 1.2);
        double rho_lo = std::pow(std::max(1e-12, (w_lo - ac - e)) / ag, 1.0 / j.degree);
        rho_hi = std::pow((w_hi + ac + e) / ag, 1.0 / j.degree);
        // |R'(z)| bounds over that radial range.
        double lead_lo = j.degree * ag * std::pow(rho_lo, j.degree - 1);
        double lead_hi = j.degree * ag * std::pow(rho_hi, j.degree - 1);
        double pert = 0.0;
        int pow10 = j.degree - 1;
        for (std::size_t i = 0; i < j.eps.size(); ++i) {
            pert += pow10 * std::abs(j.eps[i]) * std::pow(rho_hi, pow10 - 1);
            --pow10;
        }
        double rp_lo = lead_lo - pert, rp_hi = lead_hi + pert;
        if (rp_lo <= 0.0)
            throw std::domain_error("branch derivative bound degenerate (perturbation too large)");
        return {1.0 / rp_hi, 1.0 / rp_lo};
    }

    std::variant<AffineMap1D, CubicMap1D, JuliaBranchMap> impl_;
    Box domain_;
    double r_lo_ = 0.0;
    double r_hi_ = 0.0;
};

} // namespace ifsdim
