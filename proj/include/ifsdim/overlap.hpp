#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ifsdim/gibbs.hpp"
#include "ifsdim/membership.hpp"
#include "ifsdim/parallel.hpp"
#include "ifsdim/rng.hpp"

namespace ifsdim {

struct OverlapOptions {
    std::size_t n = 12;
    std::size_t samples = 2000;
    std::uint64_t seed = 1;
    std::size_t burn_in = 40;
    double tau = -1.0; // <= 0: auto, 0.1 * table oscillation (floored at 1e-9)
    MembershipOptions membership{};
    unsigned max_threads = 0;
};

// Monte Carlo estimate of log o with sample diagnostics. `values` holds the
// per-sample (1/n) log counts of the primary (cover-based) series; the
// bracket combines the certified lower series with the shallow-cover series,
// each widened by three standard errors.
struct OverlapEstimate {
    std::size_t n = 0;
    double tau = 0.0; // 0 for the topological estimate
    std::size_t sample_count = 0;
    std::vector<double> values;
    double mean = 0.0;
    double std_error = 0.0;
    double lower_mean = 0.0, lower_se = 0.0;
    double shallow_mean = 0.0, shallow_se = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double mean_tau_double = 0.0, mean_tau_half = 0.0;
    std::size_t truncated_samples = 0;
    std::size_t clamped_samples = 0;
    bool tau_warning = false;

    bool truncated() const { return truncated_samples > 0; }
};

namespace detail {

struct MeanSe {
    double mean;
    double se;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    if (v.size() < 2) return {m, 0.0};
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(v.size() - 1);
    return {m, std::sqrt(s2 / static_cast<double>(v.size()))};
}

inline double log_count(std::uint64_t c, std::size_t n, bool& clamped) {
    if (c == 0) { clamped = true; c = 1; } // log o >= 0 always; 0-counts floor at 1
    return std::log(static_cast<double>(c)) / static_cast<double>(n);
}

} // namespace detail

struct GenericCountResult {
    BetaCounts counts;                 // at the primary tau
    std::uint64_t count_tau_double = 0; // cover-based count at 2*tau
    std::uint64_t count_tau_half = 0;   // cover-based count at tau/2
    bool tau_warning = false;
};

// b_n((omega, x), tau, mu): number of n-words eta with
// phi_{omega_n...omega_1}(x) in phi_{eta_n...eta_1}(Lambda) whose Birkhoff
// average of the defining potential lies within tau of its mu-integral.
// The DFS enumerates eta back to front (the composition is order-reversing)
// and prunes on both membership and the bracket
// [partial + r*min(psi), partial + r*max(psi)] of the final Birkhoff sum.
// Tail windows follow the all-zeros padding convention of birkhoff_sum.
inline GenericCountResult generic_count_bn(const MembershipTester& tester,
                                           const GibbsMeasure& mu, const Word& omega,
                                           Point x, std::size_t n, double tau) {
    if (n == 0) throw std::invalid_argument("generic_count_bn needs n >= 1");
    if (omega.size() < n) throw std::invalid_argument("generic_count_bn needs |omega| >= n");
    if (!(tau > 0.0)) throw std::invalid_argument("generic_count_bn needs tau > 0");

    const IfsSystem& sys = tester.system();
    const std::size_t m = mu.alphabet_size();
    const std::size_t k = mu.locality();
    const auto& table = mu.psi_table();
    const double target = mu.potential_integral();

    double min_v = table[0], max_v = table[0];
    for (double v : table) { min_v = std::min(min_v, v); max_v = std::max(max_v, v); }

    GenericCountResult out;
    double osc = k >= 2 ? static_cast<double>(k - 1) * (max_v - min_v) : 0.0;
    out.tau_warning = tau < osc / static_cast<double>(n);

    // z = phi_{omega_n...omega_1}(x)
    Point z = apply_word(sys, omega.prefix(n).reversed(), x);

    const double tau_wide = 2.0 * tau;
    const double nd = static_cast<double>(n);
    std::vector<Symbol> stack(n, 0);
    std::uint64_t nodes = 0;

    // Window completed when u_t is assigned: eta-positions (n+1-t .. n+k-t),
    // i.e. symbols u_t, u_{t-1}, ..., padded with 0 past the end of eta.
    auto window_value = [&](std::size_t t) {
        std::size_t idx = 0;
        for (std::size_t off = 0; off < k; ++off) {
            Symbol s = (t > off) ? stack[t - off - 1] : Symbol{0};
            idx = idx * m + s;
        }
        return table[idx];
    };

    auto dfs = [&](auto&& self, Point y, double tol, std::size_t t, double partial) -> void {
        for (std::size_t j = 0; j < m; ++j) {
            if (++nodes > tester.options().node_budget) {
                out.counts.truncated = true;
                return;
            }
            auto step = tester.inverse_step(static_cast<Symbol>(j), y, tol);
            if (!step) continue;
            auto [ny, ntol] = *step;
            stack[t] = static_cast<Symbol>(j);
            double ps = partial + window_value(t + 1);
            const double rem = static_cast<double>(n - t - 1);
            if (rem > 0.0 &&
                (ps + rem * max_v <= nd * (target - tau_wide) ||
                 ps + rem * min_v >= nd * (target + tau_wide)))
                continue;
            if (t + 1 == n) {
                const double dev = std::abs(ps / nd - target);
                bool member_deep = tester.upper_member(ny, ntol);
                if (member_deep && dev < 2.0 * tau) ++out.count_tau_double;
                if (member_deep && dev < 0.5 * tau) ++out.count_tau_half;
                if (dev < tau) {
                    if (member_deep) ++out.counts.upper;
                    if (tester.shallow_member(ny, ntol)) ++out.counts.upper_shallow;
                    if (tester.certified_member(ny, ntol)) ++out.counts.lower;
                }
            } else {
                if (!tester.shallow_member(ny, tester.prune_tol(ntol))) continue;
                self(self, ny, ntol, t + 1, ps);
                if (out.counts.truncated) return;
            }
        }
    };
    dfs(dfs, z, tester.eta(), 0, 0.0);
    return out;
}

namespace detail {

inline OverlapEstimate reduce_overlap(std::size_t n, double tau,
                                      const std::vector<BetaCounts>& counts,
                                      const std::vector<std::uint64_t>* tau2,
                                      const std::vector<std::uint64_t>* tauh,
                                      bool tau_warning) {
    OverlapEstimate est;
    est.n = n;
    est.tau = tau;
    est.sample_count = counts.size();
    est.tau_warning = tau_warning;
    std::vector<double> lower, shallow, t2, th;
    est.values.reserve(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto& c = counts[i];
        bool clamped = false, aux = false;
        est.values.push_back(log_count(c.upper, n, clamped));
        lower.push_back(log_count(c.lower, n, aux)); // lower-series clamps are by design
        shallow.push_back(log_count(c.upper_shallow, n, aux));
        if (tau2) t2.push_back(log_count((*tau2)[i], n, aux));
        if (tauh) th.push_back(log_count((*tauh)[i], n, aux));
        if (clamped) ++est.clamped_samples;
        if (c.truncated) ++est.truncated_samples;
    }
    auto [m, se] = mean_se(est.values);
    est.mean = m;
    est.std_error = se;
    auto lo = mean_se(lower);
    est.lower_mean = lo.mean;
    est.lower_se = lo.se;
    auto sh = mean_se(shallow);
    est.shallow_mean = sh.mean;
    est.shallow_se = sh.se;
    est.bracket_lo = lo.mean - 3.0 * lo.se;
    est.bracket_hi = sh.mean + 3.0 * sh.se;
    if (tau2) est.mean_tau_double = mean_se(t2).mean;
    if (tauh) est.mean_tau_half = mean_se(th).mean;
    return est;
}

} // namespace detail

// log o(S) from the beta_n growth rate along maximal-entropy samples.
inline OverlapEstimate topological_overlap(const IfsSystem& sys, const OverlapOptions& opt) {
    if (opt.n == 0 || opt.samples == 0)
        throw std::invalid_argument("topological_overlap needs n >= 1 and samples >= 1");
    MembershipTester tester(sys, opt.membership);
    auto uniform = gibbs_from_weights(BernoulliWeights(
        std::vector<double>(sys.alphabet_size(), 1.0 / double(sys.alphabet_size()))));
    std::vector<BetaCounts> counts(opt.samples);
    parallel_for(opt.samples, [&](std::size_t i) {
        Rng rng = Rng::stream(opt.seed, i);
        Word w = uniform.sample_word(opt.n + opt.burn_in, rng);
        Point x = pi_point(sys, w).point;
        counts[i] = tester.beta_counts(x, opt.n);
    }, opt.max_threads);
    return detail::reduce_overlap(opt.n, 0.0, counts, nullptr, nullptr, false);
}

// log o(S, mu) from generic preimage counts along mu-samples pushed onto the
// attractor by burn-in reversal. Reports tau-sensitivity at 2*tau and tau/2.
inline OverlapEstimate measure_overlap(const IfsSystem& sys, const GibbsMeasure& mu,
                                       const OverlapOptions& opt) {
    if (opt.n == 0 || opt.samples == 0)
        throw std::invalid_argument("measure_overlap needs n >= 1 and samples >= 1");
    if (mu.alphabet_size() != sys.alphabet_size())
        throw std::invalid_argument("measure alphabet does not match the system");
    MembershipTester tester(sys, opt.membership);

    double tau = opt.tau;
    if (!(tau > 0.0)) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double v : mu.psi_table()) {
            if (std::isfinite(v)) { lo = std::min(lo, v); hi = std::max(hi, v); }
        }
        tau = std::max(0.1 * (hi - lo), 1e-9);
    }

    std::vector<BetaCounts> counts(opt.samples);
    std::vector<std::uint64_t> tau2(opt.samples), tauh(opt.samples);
    std::vector<char> warn(opt.samples, 0);
    parallel_for(opt.samples, [&](std::size_t i) {
        Rng rng = Rng::stream(opt.seed, i);
        Word w = mu.sample_word(opt.n + opt.burn_in, rng);
        Point x = apply_word(sys, w.prefix(opt.burn_in).reversed(), sys.seed().anchor());
        auto res = generic_count_bn(tester, mu, w.suffix_from(opt.burn_in), x, opt.n, tau);
        counts[i] = res.counts;
        tau2[i] = res.count_tau_double;
        tauh[i] = res.count_tau_half;
        warn[i] = res.tau_warning ? 1 : 0;
    }, opt.max_threads);
    bool tau_warning = false;
    for (char c : warn) tau_warning = tau_warning || c != 0;
    return detail::reduce_overlap(opt.n, tau, counts, &tau2, &tauh, tau_warning);
}

} // namespace ifsdim
