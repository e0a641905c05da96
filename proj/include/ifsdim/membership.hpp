#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ifsdim/ifs_system.hpp"

namespace ifsdim {

struct MembershipOptions {
    std::size_t cover_depth = 10;   // outer cover depth for the upper count
    std::size_t shallow_offset = 4; // bracket series re-counts at depth-4
    double eta_rel = 1e-12;         // boundary tolerance, relative to diam(V)
    std::uint64_t node_budget = 10'000'000;
};

struct BetaCounts {
    std::uint64_t lower = 0;         // certified membership count
    std::uint64_t upper = 0;         // count against the depth-m_cover cover
    std::uint64_t upper_shallow = 0; // count against the shallower cover
    bool truncated = false;          // node budget hit, bracket is partial
};

// Decides "x in phi_w(Lambda)" against finite approximations of Lambda.
//
// The word DFS runs in preimage space: a prefix (j_1...j_t) stays viable
// while y_t = phi_{j_t}^-1(...phi_{j_1}^-1(x)) remains inside the outer
// cover (equivalent to the forward criterion x in enclosure(j_1...j_t),
// since images of longer words nest inside the depth-m_cover cover). The
// boundary tolerance eta is carried along the orbit and amplified by the
// local expansion of each inverse step, so it matches an x-space eta at
// every depth.
//
// 1-D systems test against the merged interval cover of depth m_cover.
// Planar branch systems use the exact orbit characterization instead:
// y lies in the depth-m cover iff some m-step forward orbit under the
// underlying rational maps stays inside the annulus. That sidesteps the
// branch-cut hull blowup of axis-aligned enclosures entirely.
//
// Upper counts test the leaf preimage against the outer cover: sound, since
// a true member's preimage lies in Lambda itself. Lower counts require a
// certificate: either y lands well inside a verified sub-self-covering
// region K (K subset of union phi_i(K) implies K subset of Lambda), or y
// coincides with a map fixed point up to tolerance.
class MembershipTester {
public:
    explicit MembershipTester(const IfsSystem& sys, MembershipOptions opt = {})
        : sys_(&sys), opt_(opt) {
        if (opt_.cover_depth < 1) throw std::invalid_argument("cover_depth must be >= 1");
        eta_ = opt_.eta_rel * sys.seed().diam();
        // Large alphabets cap the affordable cover depth.
        while (opt_.cover_depth > 2 &&
               std::pow(double(sys.alphabet_size()), double(opt_.cover_depth)) > 4e6)
            --opt_.cover_depth;
        shallow_depth_ =
            opt_.cover_depth > opt_.shallow_offset + 1 ? opt_.cover_depth - opt_.shallow_offset : 2;
        shallow_depth_ = std::min(shallow_depth_, opt_.cover_depth);
        if (sys.ambient_dim() == 1) {
            build_cover(opt_.cover_depth, deep_1d_);
            build_cover(shallow_depth_, shallow_1d_);
        } else {
            collect_distinct_rational_maps();
        }
        build_inner_certificate();
    }

    const IfsSystem& system() const { return *sys_; }
    const MembershipOptions& options() const { return opt_; }
    double eta() const { return eta_; }
    bool inner_region_certified() const { return inner_full_; }
    const std::vector<Point>& certified_points() const { return inner_points_; }

    // beta_n(x): number of n-words w with x in phi_{w_1...w_n}(Lambda),
    // bracketed between the certified and the cover-based count.
    BetaCounts beta_counts(Point x, std::size_t n) const {
        if (n == 0) throw std::invalid_argument("beta_counts needs n >= 1");
        if (!sys_->seed().contains(x, 1e-6 * sys_->seed().diam()))
            throw std::domain_error("beta_counts: point outside inflated seed");
        BetaCounts out;
        std::uint64_t nodes = 0;
        dfs_beta(x, eta_, n, out, nodes);
        return out;
    }

    // Unpruned enumeration oracle with the identical leaf test.
    std::uint64_t brute_force_beta(Point x, std::size_t n) const {
        const std::size_t m = sys_->alphabet_size();
        double total = 1.0;
        for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(m);
        if (total > 1e7) throw std::length_error("brute_force_beta: m^n exceeds 1e7");
        std::uint64_t count = 0;
        const auto words = static_cast<std::uint64_t>(total);
        for (std::uint64_t idx = 0; idx < words; ++idx) {
            Word w = word_from_index(idx, m, n);
            Point y = x;
            double tol = eta_;
            bool viable = true;
            for (std::size_t t = 0; t < n; ++t) {
                auto step = inverse_step(w[t], y, tol);
                if (!step) { viable = false; break; }
                y = step->first;
                tol = step->second;
            }
            if (viable && upper_member(y, tol)) ++count;
        }
        return count;
    }

    // One preimage step phi_j^{-1}(y) with tolerance amplification. For
    // branch maps the inverse is the shared rational map, so membership in
    // branch j's range is decided by the round trip f_j(R(y)) == y; nullopt
    // when y lies in a different branch's sector.
    std::optional<std::pair<Point, double>> inverse_step(Symbol j, Point y, double tol) const {
        const auto& map = sys_->map(j);
        Point ny = map.inverse(y);
        double ntol = amplify(map, ny, tol);
        if (map.is_planar()) {
            double match = 4.0 * tol + 1e-9 * sys_->seed().diam();
            if (std::abs(map.apply(ny) - y) > match) return std::nullopt;
        }
        return std::pair{ny, ntol};
    }

    bool upper_member(Point y, double tol) const {
        if (sys_->ambient_dim() == 1) return in_cover(deep_1d_, y, tol);
        return orbit_stays_in_annulus(y, tol, opt_.cover_depth);
    }
    bool shallow_member(Point y, double tol) const {
        if (sys_->ambient_dim() == 1) return in_cover(shallow_1d_, y, tol);
        return orbit_stays_in_annulus(y, tol, shallow_depth_);
    }

    bool certified_member(Point y, double tol) const {
        if (inner_full_) {
            for (const auto& iv : inner_1d_)
                if (y.real() >= iv.lo + eta_ && y.real() <= iv.hi - eta_ &&
                    std::abs(y.imag()) <= tol)
                    return true;
        }
        const double point_tol = std::max(eta_, tol);
        if (inner_circle_ && std::abs(std::abs(y) - 1.0) <= point_tol) return true;
        for (Point p : inner_points_)
            if (std::abs(y - p) <= point_tol) return true;
        return false;
    }

    // Tolerance ball growth across one inverse step: the inverse expands by
    // the reciprocal of the map's contraction at the preimage point.
    double amplify(const ConformalMap& map, Point y_post, double tol) const {
        double factor = map.kind() == ConformalMap::Kind::Affine1D
                            ? 1.0 / std::abs(map.affine().a)
                            : 1.0 / std::max(map.deriv_mod(y_post), 1e-12);
        return tol * factor + 4e-16 * sys_->seed().diam();
    }

    // Viability margin used while descending; looser than the leaf test by
    // the distortion constant so pruning can never drop a leaf acceptor.
    double prune_tol(double tol) const {
        return 4.0 * sys_->contraction_bounds().distortion * tol + eta_;
    }

private:
    void dfs_beta(Point y, double tol, std::size_t remaining, BetaCounts& out,
                  std::uint64_t& nodes) const {
        const std::size_t m = sys_->alphabet_size();
        for (Symbol j = 0; j < m; ++j) {
            if (++nodes > opt_.node_budget) {
                out.truncated = true;
                return;
            }
            auto step = inverse_step(j, y, tol);
            if (!step) continue;
            auto [ny, ntol] = *step;
            if (remaining == 1) {
                if (upper_member(ny, ntol)) ++out.upper;
                if (shallow_member(ny, ntol)) ++out.upper_shallow;
                if (certified_member(ny, ntol)) ++out.lower;
            } else {
                if (!shallow_member(ny, prune_tol(ntol))) continue;
                dfs_beta(ny, ntol, remaining - 1, out, nodes);
                if (out.truncated) return;
            }
        }
    }

    void build_cover(std::size_t depth, std::vector<Ival>& merged) const {
        auto cover = limit_set_cover(*sys_, depth, 4'000'000);
        std::vector<Ival> iv;
        iv.reserve(cover.size());
        for (const auto& [w, b] : cover) iv.push_back(b.x);
        std::sort(iv.begin(), iv.end(), [](Ival a, Ival b) { return a.lo < b.lo; });
        for (const auto& v : iv) {
            if (!merged.empty() && v.lo <= merged.back().hi) {
                merged.back().hi = std::max(merged.back().hi, v.hi);
            } else {
                merged.push_back(v);
            }
        }
    }

    bool in_cover(const std::vector<Ival>& merged, Point y, double tol) const {
        if (std::abs(y.imag()) > tol) return false;
        const double v = y.real();
        auto it = std::upper_bound(merged.begin(), merged.end(), v,
                                   [](double val, const Ival& iv) { return val < iv.lo; });
        if (it != merged.begin() && std::prev(it)->contains(v, tol)) return true;
        return it != merged.end() && it->contains(v, tol);
    }

    void collect_distinct_rational_maps() {
        for (const auto& m : sys_->maps()) {
            const auto& j = m.julia();
            bool seen = false;
            for (const ConformalMap* r : rational_maps_) {
                const auto& k = r->julia();
                if (k.degree == j.degree && k.gamma == j.gamma && k.c == j.c && k.eps == j.eps) {
                    seen = true;
                    break;
                }
            }
            if (!seen) rational_maps_.push_back(&m);
        }
    }

    // Exact cover test for branch systems: y lies in the union of the
    // depth-m cylinder images iff some m-step orbit under the rational maps
    // stays inside the annulus. Forward maps are smooth, so the tolerance
    // amplifies by the local |R'|.
    bool orbit_stays_in_annulus(Point y, double tol, std::size_t depth) const {
        const auto& seed = sys_->seed();
        double r = std::abs(y);
        if (r < seed.r_lo - tol || r > seed.r_hi + tol) return false;
        if (depth == 0) return true;
        for (const ConformalMap* m : rational_maps_) {
            Point ny = m->inverse(y); // R applied forward
            double ntol = tol / std::max(m->deriv_mod(ny), 1e-12) +
                          4e-16 * sys_->seed().diam();
            if (orbit_stays_in_annulus(ny, ntol, depth - 1)) return true;
        }
        return false;
    }

    void build_inner_certificate() {
        // Tier 1 (1-D): if the map images jointly cover V, then V itself is
        // sub-self-covering, so V = Lambda up to hairline gaps.
        if (sys_->ambient_dim() == 1) {
            const Ival v = sys_->seed().box.x;
            std::vector<Ival> imgs;
            for (const auto& m : sys_->maps()) {
                Box b = m.image_box(sys_->seed().box);
                imgs.push_back(b.x.inflated(-1e-14 * sys_->seed().diam()));
            }
            std::sort(imgs.begin(), imgs.end(), [](Ival a, Ival b) { return a.lo < b.lo; });
            const double gap_tol = 1e-9 * sys_->seed().diam();
            double reach = v.lo + gap_tol;
            bool covered = true;
            for (const auto& iv : imgs) {
                if (iv.lo > reach + gap_tol) { covered = false; break; }
                reach = std::max(reach, iv.hi);
            }
            covered = covered && reach >= v.hi - gap_tol;
            if (covered) {
                inner_full_ = true;
                inner_1d_.push_back(v);
            }
        }
        // Planar tier 1: for unperturbed unimodular maps gamma*z^d the limit
        // set is exactly the unit circle (invariant under every branch), so
        // the circle itself is certified.
        if (sys_->ambient_dim() == 2) {
            bool pure = true;
            for (const auto& m : sys_->maps()) {
                const auto& j = m.julia();
                if (j.c != std::complex<double>{0.0, 0.0} || !j.eps.empty() ||
                    std::abs(std::abs(j.gamma) - 1.0) > 1e-15)
                    pure = false;
            }
            inner_circle_ = pure;
        }
        // Tier 2: fixed points of the individual maps always lie in Lambda.
        for (const auto& m : sys_->maps()) {
            std::optional<Point> fp;
            if (m.kind() == ConformalMap::Kind::Affine1D) {
                const auto& a = m.affine();
                fp = Point{a.b / (1.0 - a.a), 0.0};
            } else {
                Point z = sys_->seed().anchor();
                for (int it = 0; it < 400; ++it) {
                    Point nz = m.apply(z);
                    if (std::abs(nz - z) <= 1e-16 * (1.0 + std::abs(nz))) { z = nz; break; }
                    z = nz;
                }
                fp = z;
            }
            if (fp && std::abs(m.apply(*fp) - *fp) <= 1e-12 * sys_->seed().diam())
                inner_points_.push_back(*fp);
        }
    }

    const IfsSystem* sys_;
    MembershipOptions opt_;
    double eta_ = 0.0;
    std::size_t shallow_depth_ = 2;
    std::vector<Ival> deep_1d_, shallow_1d_, inner_1d_;
    std::vector<const ConformalMap*> rational_maps_;
    bool inner_full_ = false;
    bool inner_circle_ = false;
    std::vector<Point> inner_points_;
};

} // namespace ifsdim
