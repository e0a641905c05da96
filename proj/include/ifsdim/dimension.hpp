#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ifsdim/overlap.hpp"
#include "ifsdim/partition.hpp"

namespace ifsdim {

// HD = (h - log o) / |chi|. Clamps results in [-1e-12, 0] to 0; anything
// more negative signals inconsistent inputs and throws.
inline double hd_formula(double h, double log_o, double chi) {
    if (!(chi < 0.0)) throw std::invalid_argument("hd_formula needs chi < 0");
    if (h < 0.0) throw std::invalid_argument("hd_formula needs h >= 0");
    if (log_o < 0.0) throw std::invalid_argument("hd_formula needs log_o >= 0");
    double hd = (h - log_o) / std::abs(chi);
    if (hd < 0.0) {
        if (hd < -1e-12)
            throw std::domain_error("hd_formula: log o exceeds the entropy");
        hd = 0.0;
    }
    return hd;
}

struct LyapunovEstimate {
    double chi = 0.0;      // Monte Carlo estimate (exact value when available)
    double std_error = 0.0;
    std::optional<double> exact; // closed form for affine systems
};

// chi(mu) = int log|phi'_{omega_1}(pi sigma omega)| dmu, estimated as the
// Birkhoff average (1/n) log|phi'_{omega_n...omega_1}(anchor)|; bounded
// distortion makes the base point irrelevant at this precision.
inline LyapunovEstimate lyapunov(const IfsSystem& sys, const GibbsMeasure& mu,
                                 std::size_t n, std::size_t samples, std::uint64_t seed,
                                 unsigned max_threads = 0) {
    if (n == 0 || samples == 0)
        throw std::invalid_argument("lyapunov needs n >= 1 and samples >= 1");
    LyapunovEstimate est;
    if (sys.all_affine()) {
        double chi = 0.0;
        for (std::size_t s = 0; s < mu.state_count(); ++s)
            for (std::size_t j = 0; j < sys.alphabet_size(); ++j) {
                double q = mu.transition(s, static_cast<Symbol>(j));
                if (q > 0.0)
                    chi += mu.stationary()[s] * q *
                           std::log(std::abs(sys.map(static_cast<Symbol>(j)).affine().a));
            }
        est.exact = chi;
    }
    std::vector<double> vals(samples);
    parallel_for(samples, [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        Word w = mu.sample_word(n, rng);
        vals[i] = word_log_derivative(sys, w.reversed(), sys.seed().anchor()) /
                  static_cast<double>(n);
    }, max_threads);
    auto [m, se] = detail::mean_se(vals);
    est.chi = m;
    est.std_error = se;
    return est;
}

struct DropFlags {
    bool drop = false;
    bool separated = false;
    bool inconclusive = false;
};

// Exact dichotomy decided on the bracket, not the point estimate: a drop is
// claimed only when the certified lower end of log o clears 0.
inline DropFlags dimension_drop(const OverlapEstimate& est) {
    DropFlags f;
    if (est.truncated()) {
        f.inconclusive = true;
    } else if (est.bracket_lo > 0.0) {
        f.drop = true;
    } else if (est.bracket_hi >= 0.0) {
        f.separated = true;
    } else {
        f.inconclusive = true;
    }
    return f;
}

struct LowerBound {
    double value = 0.0;
    bool clamped = false; // negative (vacuous) bound reported as 0
};

// HD >= (h(mu) - (1/q) int theta dmu) / |chi_s| with theta = log m_j on U_j.
inline LowerBound qint_lower_bound(const IfsSystem& sys, const PartitionScheme& scheme,
                                   const GibbsMeasure& mu, double chi) {
    if (!(chi < 0.0)) throw std::invalid_argument("qint_lower_bound needs chi < 0");
    const std::size_t m = sys.alphabet_size();
    const std::size_t count = word_count_pow(m, scheme.q, 100'000);
    auto owner = scheme.group_of_word(count);
    auto cards = scheme.cardinalities();
    double theta_int = 0.0;
    for (std::size_t w = 0; w < count; ++w) {
        double mass = mu.cylinder_mass(word_from_index(w, m, scheme.q));
        theta_int += mass * std::log(static_cast<double>(cards[owner[w]]));
    }
    double value = (entropy(mu) - theta_int / static_cast<double>(scheme.q)) / std::abs(chi);
    LowerBound out;
    out.clamped = value < 0.0;
    out.value = std::max(value, 0.0);
    return out;
}

// Bernoulli specialization evaluated by its own plug-in formula:
// HD >= (-sum p log p - (1/q) sum_i log(m_i) sum_{G_i} p_{j_1}...p_{j_q}) / |chi|.
inline LowerBound scm_lower_bound(const IfsSystem& sys, const PartitionScheme& scheme,
                                  const BernoulliWeights& weights, double chi) {
    if (!(chi < 0.0)) throw std::invalid_argument("scm_lower_bound needs chi < 0");
    const std::size_t m = sys.alphabet_size();
    if (weights.size() != m) throw std::invalid_argument("weights size mismatch");
    const std::size_t count = word_count_pow(m, scheme.q, 100'000);
    (void)scheme.group_of_word(count);
    double h = 0.0;
    for (double p : weights.p)
        if (p > 0.0) h -= p * std::log(p);
    double penalty = 0.0;
    for (const auto& group : scheme.groups) {
        double group_mass = 0.0;
        for (std::size_t w : group) {
            Word word = word_from_index(w, m, scheme.q);
            double prod = 1.0;
            for (std::size_t i = 0; i < word.size(); ++i) prod *= weights.p[word[i]];
            group_mass += prod;
        }
        penalty += std::log(static_cast<double>(group.size())) * group_mass;
    }
    double value = (h - penalty / static_cast<double>(scheme.q)) / std::abs(chi);
    LowerBound out;
    out.clamped = value < 0.0;
    out.value = std::max(value, 0.0);
    return out;
}

struct EmpiricalDimension {
    double median = 0.0;
    double iqr = 0.0;
    std::size_t pivots_used = 0;
};

struct EmpiricalOptions {
    std::size_t points = 10'000;
    std::size_t pivots = 384;
    std::size_t word_length = 40;
    std::uint64_t seed = 1;
    double r_max_rel = 0.1;   // ladder top, relative to diam(V)
    std::size_t max_rungs = 26;
    std::size_t min_count = 8;
    unsigned max_threads = 0;
};

// Finite-scale pointwise-dimension proxy: per pivot, regress
// log(fraction of cloud within r) on log r over a dyadic ladder; report the
// median and IQR of the slopes. Exact dimensionality predicts a small IQR.
inline EmpiricalDimension empirical_pointwise_dimension(const IfsSystem& sys,
                                                        const GibbsMeasure& mu,
                                                        const EmpiricalOptions& opt) {
    if (opt.points < 1000) throw std::invalid_argument("empirical needs N >= 1000");
    const double diam = sys.seed().diam();
    const double r_max = opt.r_max_rel * diam;
    const double kappa = sys.contraction_bounds().kappa_max;
    const double r_floor = std::max(std::pow(kappa, 40.0) * diam,
                                    r_max * std::pow(0.5, double(opt.max_rungs - 1)));
    std::size_t rungs = 1;
    while (rungs < opt.max_rungs && r_max * std::pow(0.5, double(rungs)) >= r_floor) ++rungs;
    if (rungs < 4) throw std::runtime_error("degenerate radius ladder");

    std::vector<Point> pts(opt.points);
    parallel_for(opt.points, [&](std::size_t i) {
        Rng rng = Rng::stream(opt.seed, i);
        pts[i] = pi_point(sys, mu.sample_word(opt.word_length, rng)).point;
    }, opt.max_threads);

    // Coincident cloud: slope 0 by convention.
    double spread = 0.0;
    for (const auto& p : pts) spread = std::max(spread, std::abs(p - pts[0]));
    if (spread <= r_max * std::pow(0.5, double(rungs))) return {0.0, 0.0, 0};

    // Distance to the seed boundary: balls that stick out get clipped counts
    // at the coarse rungs, which flattens slopes for the sizable fraction of
    // mass near the boundary. Those rungs are excluded per pivot.
    auto boundary_dist = [&](Point p) {
        const auto& seed = sys.seed();
        if (seed.annulus) {
            double r = std::abs(p);
            return std::min(r - seed.r_lo, seed.r_hi - r);
        }
        return std::min(p.real() - seed.box.x.lo, seed.box.x.hi - p.real());
    };

    const std::size_t pivots = std::min(opt.pivots, opt.points);
    std::vector<double> slopes(pivots, std::numeric_limits<double>::quiet_NaN());
    parallel_for(pivots, [&](std::size_t pi) {
        const Point pivot = pts[pi];
        std::vector<std::uint64_t> hist(rungs + 1, 0);
        for (const auto& p : pts) {
            double d = std::abs(p - pivot);
            if (d > r_max) continue;
            // deepest rung whose radius still covers d
            std::size_t j = d <= 0.0 ? rungs : std::min<std::size_t>(
                rungs, static_cast<std::size_t>(std::floor(std::log2(r_max / d))));
            ++hist[j];
        }
        // count at rung j = points within r_j
        std::vector<std::uint64_t> counts(rungs, 0);
        std::uint64_t acc = 0;
        for (std::size_t j = rungs + 1; j-- > 0;) {
            acc += hist[j];
            if (j < rungs) counts[j] = acc;
        }
        // Usable rungs: ball fully interior, below saturation, above the
        // count floor. The deepest usable rung is dropped: conditioning on
        // "count >= floor" inflates the count right at the threshold and
        // biases slopes shallow.
        const double delta = boundary_dist(pivot);
        std::size_t j_lo = 0;
        while (j_lo < rungs && r_max * std::pow(0.5, double(j_lo)) > delta) ++j_lo;
        std::size_t j_hi = rungs;
        for (std::size_t j = j_lo; j < rungs; ++j) {
            if (counts[j] < opt.min_count) { j_hi = j; break; }
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t used = 0;
        for (std::size_t j = j_lo; j + 1 < j_hi; ++j) {
            std::uint64_t c = counts[j];
            if (c > opt.points * 9 / 10) continue;
            double x = std::log(r_max) + double(j) * std::log(0.5);
            double y = std::log(double(c) / double(opt.points));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++used;
        }
        if (used >= 4) {
            double n = double(used);
            slopes[pi] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        }
    }, opt.max_threads);

    std::vector<double> good;
    for (double s : slopes)
        if (!std::isnan(s)) good.push_back(s);
    if (good.size() < 8) throw std::runtime_error("degenerate radius ladder (too few usable pivots)");
    std::sort(good.begin(), good.end());
    auto quantile = [&](double f) {
        return good[std::min(good.size() - 1,
                             static_cast<std::size_t>(f * double(good.size())))];
    };
    return {quantile(0.5), quantile(0.75) - quantile(0.25), good.size()};
}

// Full evaluation of the dimension formula for one self-conformal measure.
struct DimensionReport {
    double h = 0.0;
    double chi = 0.0;
    double chi_err = 0.0;
    std::optional<double> chi_exact;
    double log_o = 0.0;
    OverlapEstimate overlap;
    double hd = 0.0;
    double hd_naive = 0.0;
    std::optional<double> bound; // partition lower bound, when a scheme applies
    bool bound_clamped = false;
    DropFlags flags;
    std::optional<EmpiricalDimension> empirical;

    bool truncated() const { return overlap.truncated(); }
    bool inconclusive() const { return flags.inconclusive; }
};

struct DimensionOptions {
    OverlapOptions overlap{};
    std::size_t lyapunov_n = 1000;
    std::size_t lyapunov_samples = 200;
    std::optional<std::size_t> partition_q; // also compute the scm bound
    bool with_empirical = false;
    EmpiricalOptions empirical{};
};

inline DimensionReport self_conformal_dimension(const IfsSystem& sys,
                                                const BernoulliWeights& weights,
                                                const DimensionOptions& opt) {
    if (weights.size() != sys.alphabet_size())
        throw std::invalid_argument("weights size must match the alphabet");
    DimensionReport rep;
    auto mu = gibbs_from_weights(weights);
    rep.h = entropy(mu);
    auto lyap = lyapunov(sys, mu, opt.lyapunov_n, opt.lyapunov_samples,
                         opt.overlap.seed ^ 0x9E37u, opt.overlap.max_threads);
    rep.chi = lyap.exact ? *lyap.exact : lyap.chi;
    rep.chi_err = lyap.exact ? 0.0 : lyap.std_error;
    rep.chi_exact = lyap.exact;
    rep.overlap = measure_overlap(sys, mu, opt.overlap);
    rep.log_o = rep.overlap.mean;
    rep.hd = hd_formula(rep.h, rep.log_o, rep.chi);
    rep.hd_naive = rep.h / std::abs(rep.chi);
    rep.flags = dimension_drop(rep.overlap);
    if (opt.partition_q) {
        auto scheme = default_partition(sys, *opt.partition_q);
        if (verify_partition(sys, scheme).accepted) {
            auto b = scm_lower_bound(sys, scheme, weights, rep.chi);
            rep.bound = b.value;
            rep.bound_clamped = b.clamped;
        }
    }
    if (opt.with_empirical) {
        EmpiricalOptions eo = opt.empirical;
        eo.seed = opt.overlap.seed ^ 0xE17Au;
        eo.max_threads = opt.overlap.max_threads;
        rep.empirical = empirical_pointwise_dimension(sys, mu, eo);
    }
    return rep;
}

} // namespace ifsdim
