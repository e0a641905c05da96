#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ifsdim/conformal_map.hpp"
#include "ifsdim/word.hpp"

namespace ifsdim {

// Seed set V: an interval for 1-D systems, an annulus r_lo <= |z| <= r_hi
// for planar ones (the stored box is the annulus hull).
struct SeedSet {
    Box box;
    bool annulus = false;
    double r_lo = 0.0;
    double r_hi = 0.0;

    static SeedSet interval(double lo, double hi) {
        if (!(lo < hi)) throw std::invalid_argument("seed interval requires lo < hi");
        SeedSet s;
        s.box = Box::interval(lo, hi);
        return s;
    }
    static SeedSet annulus_set(double r_lo, double r_hi) {
        if (!(0.0 < r_lo && r_lo < r_hi))
            throw std::invalid_argument("annulus requires 0 < r_lo < r_hi");
        SeedSet s;
        s.annulus = true;
        s.r_lo = r_lo;
        s.r_hi = r_hi;
        s.box = Box{Ival{-r_hi, r_hi}, Ival{-r_hi, r_hi}};
        return s;
    }

    double diam() const { return annulus ? 2.0 * r_hi : box.x.width(); }

    bool contains(Point p, double tol = 0.0) const {
        if (annulus) {
            double r = std::abs(p);
            return r >= r_lo - tol && r <= r_hi + tol;
        }
        return box.x.contains(p.real(), tol) && std::abs(p.imag()) <= tol;
    }

    Point anchor() const {
        if (annulus) return {-0.5 * (r_lo + r_hi), 0.0}; // angle pi, away from the cut
        return {box.x.mid(), 0.0};
    }
};

struct ContractionBounds {
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    double distortion = 1.0; // C with |phi'_w(x)| <= C |phi'_w(y)|
};

class IfsSystem {
public:
    // Validates invariants (injectivity, uniform contraction, phi_i(V) in V)
    // and precomputes contraction/distortion bounds. Throws on violation.
    IfsSystem(std::vector<ConformalMap> maps, SeedSet seed)
        : maps_(std::move(maps)), seed_(seed) {
        if (maps_.empty()) throw std::invalid_argument("system needs at least one map");
        if (maps_.size() > 255) throw std::invalid_argument("alphabet larger than 255 not supported");
        validate();
    }

    std::size_t alphabet_size() const { return maps_.size(); }
    const ConformalMap& map(Symbol i) const { return maps_[i]; }
    const std::vector<ConformalMap>& maps() const { return maps_; }
    const SeedSet& seed() const { return seed_; }
    int ambient_dim() const { return seed_.annulus ? 2 : 1; }
    const ContractionBounds& contraction_bounds() const { return bounds_; }

    double domain_tol() const { return 1e-9 * seed_.diam(); }

    void check_symbol(Symbol i) const {
        if (i >= maps_.size())
            throw std::out_of_range("symbol " + std::to_string(int(i)) + " out of range");
    }
    void check_in_seed(Point p) const {
        if (!seed_.contains(p, domain_tol()))
            throw std::domain_error("point outside inflated seed set");
    }

    bool all_affine() const {
        for (const auto& m : maps_)
            if (!m.is_affine()) return false;
        return true;
    }

private:
    void validate() {
        bool planar = maps_.front().is_planar();
        for (const auto& m : maps_) {
            if (m.is_planar() != planar)
                throw std::invalid_argument("cannot mix 1-D and planar maps");
        }
        if (planar != seed_.annulus)
            throw std::invalid_argument("seed kind does not match map kind");

        double kmin = 1e300, kmax = 0.0;
        for (std::size_t i = 0; i < maps_.size(); ++i) {
            const auto& m = maps_[i];
            const std::string tag = "map " + std::to_string(i) + ": ";
            if (!m.is_planar()) {
                // Checked over the bracket the inverse solver works on.
                Ival ds = m.deriv_signed_range(2.0);
                if (ds.contains(0.0))
                    throw std::invalid_argument(tag + "derivative range contains 0 (not injective)");
            }
            Ival dm = m.deriv_mod_range(0.0);
            if (!(dm.hi < 1.0))
                throw std::invalid_argument(tag + "not uniformly contracting (kappa_max = " +
                                            std::to_string(dm.hi) + ")");
            if (!(dm.lo > 0.0))
                throw std::invalid_argument(tag + "derivative modulus lower bound is 0");
            kmin = std::min(kmin, dm.lo);
            kmax = std::max(kmax, dm.hi);

            const double tol = 1e-9 * seed_.diam();
            if (seed_.annulus) {
                // Radial containment; the image of the annulus under a branch
                // is itself rotationally unconstrained, so only |z| matters.
                Ival rng = branch_image_mod_range(m);
                if (rng.lo < seed_.r_lo - tol || rng.hi > seed_.r_hi + tol)
                    throw std::invalid_argument(tag + "image leaves the annulus [" +
                                                std::to_string(rng.lo) + ", " + std::to_string(rng.hi) + "]");
            } else {
                Box img = m.image_box(seed_.box);
                if (!img.contained_in(seed_.box, tol))
                    throw std::invalid_argument(tag + "image [" + std::to_string(img.x.lo) + ", " +
                                                std::to_string(img.x.hi) + "] leaves the seed interval");
            }
        }
        bounds_.kappa_min = kmin;
        bounds_.kappa_max = kmax;
        bounds_.distortion = distortion_constant();
    }

    Ival branch_image_mod_range(const ConformalMap& m) const {
        const auto& j = m.julia();
        double ac = std::abs(j.c), ag = std::abs(j.gamma);
        double rho_hi0 = std::pow((seed_.r_hi + ac) / ag, 1.0 / j.degree);
        double e = 0.0;
        {
            double p = rho_hi0 * 1.2;
            double acc = p;
            for (std::size_t t = j.eps.size(); t-- > 0;) { e += std::abs(j.eps[t]) * acc; acc *= p; }
        }
        double lo = std::pow(std::max(0.0, seed_.r_lo - ac - e) / ag, 1.0 / j.degree);
        double hi = std::pow((seed_.r_hi + ac + e) / ag, 1.0 / j.degree);
        return {lo, hi};
    }

    // Lipschitz constant of log|phi'| estimated on a grid (1-D) or from
    // radial bounds (branches), then C = exp(L * diam / (1 - kappa)).
    double distortion_constant(std::size_t grid = 1u << 10) const {
        double lip = 0.0;
        for (const auto& m : maps_) {
            if (m.kind() == ConformalMap::Kind::Affine1D) continue;
            if (!m.is_planar()) {
                const Ival dom = m.domain().x;
                const double dx = dom.width() / static_cast<double>(grid);
                double prev = std::log(m.deriv_mod({dom.lo, 0.0}));
                for (std::size_t g = 1; g <= grid; ++g) {
                    double x = dom.lo + dx * static_cast<double>(g);
                    double cur = std::log(m.deriv_mod({x, 0.0}));
                    lip = std::max(lip, std::abs(cur - prev) / dx);
                    prev = cur;
                }
            } else {
                const auto& j = m.julia();
                Ival rng = branch_image_mod_range(m);
                double ag = std::abs(j.gamma);
                double rp_lo = j.degree * ag * std::pow(std::max(rng.lo, 1e-9), j.degree - 1);
                double rpp_hi = j.degree * (j.degree - 1) * ag * std::pow(rng.hi, std::max(0, j.degree - 2));
                int pw = j.degree - 1;
                for (std::size_t t = 0; t < j.eps.size(); ++t) {
                    rp_lo -= pw * std::abs(j.eps[t]) * std::pow(rng.hi, pw - 1);
                    if (pw >= 2)
                        rpp_hi += pw * (pw - 1) * std::abs(j.eps[t]) * std::pow(rng.hi, pw - 2);
                    --pw;
                }
                if (rp_lo <= 0.0) throw std::domain_error("distortion bound degenerate");
                lip = std::max(lip, rpp_hi / (rp_lo * rp_lo));
            }
        }
        if (lip == 0.0) return 1.0; // affine systems: exactly 1
        double safety = 2.0;
        return std::exp(safety * lip * seed_.diam() / (1.0 - bounds_.kappa_max));
    }

    std::vector<ConformalMap> maps_;
    SeedSet seed_;
    ContractionBounds bounds_{};
};

// phi_i(x).
inline Point apply_map(const IfsSystem& sys, Symbol i, Point x) {
    sys.check_symbol(i);
    sys.check_in_seed(x);
    return sys.map(i).apply(x);
}

// phi_{w_1...w_n}(x) = phi_{w_1} o ... o phi_{w_n} (x); empty word is the identity.
inline Point apply_word(const IfsSystem& sys, const Word& w, Point x) {
    check_word(w, sys.alphabet_size());
    sys.check_in_seed(x);
    for (std::size_t i = w.size(); i-- > 0;) x = sys.map(w[i]).apply(x);
    return x;
}

// |phi'_{w_1...w_n}(x)| by the chain rule along the orbit.
inline double word_derivative_modulus(const IfsSystem& sys, const Word& w, Point x) {
    check_word(w, sys.alphabet_size());
    sys.check_in_seed(x);
    double acc = 1.0;
    for (std::size_t i = w.size(); i-- > 0;) {
        acc *= sys.map(w[i]).deriv_mod(x);
        x = sys.map(w[i]).apply(x);
    }
    return acc;
}

// log|phi'_{w_1...w_n}(x)|, accumulated in log space so long words cannot
// underflow the product.
inline double word_log_derivative(const IfsSystem& sys, const Word& w, Point x) {
    check_word(w, sys.alphabet_size());
    sys.check_in_seed(x);
    double acc = 0.0;
    for (std::size_t i = w.size(); i-- > 0;) {
        acc += std::log(sys.map(w[i]).deriv_mod(x));
        x = sys.map(w[i]).apply(x);
    }
    return acc;
}

// Outer enclosure of phi_w(V).
inline Box enclosure(const IfsSystem& sys, const Word& w) {
    check_word(w, sys.alphabet_size());
    Box e = sys.seed().box;
    for (std::size_t i = w.size(); i-- > 0;) e = sys.map(w[i]).image_box(e);
    return e;
}

// All words of length `depth` with their enclosures; together they cover the
// limit set. Lexicographic order.
inline std::vector<std::pair<Word, Box>>
limit_set_cover(const IfsSystem& sys, std::size_t depth, std::size_t cap = 2'000'000) {
    const std::size_t m = sys.alphabet_size();
    double total = 1.0;
    for (std::size_t d = 0; d < depth; ++d) {
        total *= static_cast<double>(m);
        if (total > static_cast<double>(cap))
            throw std::length_error("limit_set_cover: word count exceeds cap");
    }
    std::vector<std::pair<Word, Box>> level;
    level.emplace_back(Word{}, sys.seed().box);
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<std::pair<Word, Box>> next;
        next.reserve(level.size() * m);
        // Prepending j to a lexicographic level keeps the order lexicographic.
        for (std::size_t j = 0; j < m; ++j) {
            for (const auto& [w, box] : level) {
                next.emplace_back(Word{std::vector<Symbol>{static_cast<Symbol>(j)}}.concat(w),
                                  sys.map(static_cast<Symbol>(j)).image_box(box));
            }
        }
        level = std::move(next);
    }
    return level;
}

struct PiPoint {
    Point point;
    double radius;
};

// pi(omega) approximated through the cylinder word w: the returned ball
// contains pi of every infinite extension of w.
inline PiPoint pi_point(const IfsSystem& sys, const Word& w) {
    if (w.empty()) throw std::invalid_argument("pi_point needs |w| >= 1");
    Point p = apply_word(sys, w, sys.seed().anchor());
    double radius = std::pow(sys.contraction_bounds().kappa_max,
                             static_cast<double>(w.size())) * sys.seed().diam();
    return {p, radius};
}

} // namespace ifsdim
