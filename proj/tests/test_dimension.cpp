#include "doctest.h"

#include <cmath>

#include "ifsdim/dimension.hpp"
#include "ifsdim/systems.hpp"

using namespace ifsdim;

namespace {

IfsSystem cantor() { return cantor_affine({1.0 / 3.0, 1.0 / 3.0}, {0.0, 2.0 / 3.0}); }
IfsSystem dup_binary() { return cantor_affine({0.5, 0.5, 0.5}, {0.0, 0.5, 0.5}); }
IfsSystem coincident() { return cantor_affine({0.5, 0.5}, {0.0, 0.0}); }

BernoulliWeights uniform(std::size_t m) {
    return BernoulliWeights(std::vector<double>(m, 1.0 / double(m)));
}

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

} // namespace

TEST_CASE("hd_formula evaluates the dimension expression") {
    CHECK(hd_formula(kLog2, 0.0, -kLog3) == doctest::Approx(0.6309297535714574).epsilon(1e-14));
    CHECK(hd_formula(kLog2, kLog2, -kLog2) == 0.0);
    CHECK(hd_formula(kLog3, (2.0 / 3.0) * kLog2, -kLog2) ==
          doctest::Approx(0.9182958340544896).epsilon(1e-14));
    CHECK(hd_formula(1.0, 1.0 + 1e-13, -1.0) == 0.0); // tiny negative clamps
    CHECK_THROWS_AS(hd_formula(0.1, 0.5, -1.0), std::domain_error);
    CHECK_THROWS_AS(hd_formula(0.5, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("hd_formula(h, 0, chi) equals h/|chi| exactly") {
    for (double h : {0.3, 0.9, 1.4}) {
        for (double chi : {-0.5, -1.1}) {
            CHECK(hd_formula(h, 0.0, chi) == h / std::abs(chi));
        }
    }
}

TEST_CASE("lyapunov exponents: exact affine values and MC agreement") {
    auto mu2 = gibbs_from_weights(uniform(2));

    auto est = lyapunov(cantor(), mu2, 500, 100, 5);
    REQUIRE(est.exact.has_value());
    CHECK(*est.exact == doctest::Approx(-kLog3).epsilon(1e-14));
    CHECK(std::abs(est.chi - *est.exact) <= 3.0 * std::max(est.std_error, 1e-12) + 1e-12);

    auto two = cantor_affine({0.5, 0.25}, {0.0, 0.75});
    auto e2 = lyapunov(two, mu2, 800, 150, 6);
    REQUIRE(e2.exact.has_value());
    CHECK(*e2.exact == doctest::Approx(-1.5 * kLog2).epsilon(1e-14));
    CHECK(std::abs(e2.chi - *e2.exact) <= 3.0 * e2.std_error);

    auto cub = cubic_family(0.25, 1e-3);
    auto mu3 = gibbs_from_weights(uniform(3));
    auto e3 = lyapunov(cub, mu3, 500, 100, 7);
    CHECK_FALSE(e3.exact.has_value());
    auto cb = cub.contraction_bounds();
    CHECK(e3.chi >= std::log(cb.kappa_min) - 1e-9);
    CHECK(e3.chi <= std::log(cb.kappa_max) + 1e-9);
}

TEST_CASE("verify_partition on the built-in systems") {
    auto cub = cubic_family(0.25, 0.0);
    PartitionScheme grouped{1, {{0, 1}, {2}}};
    CHECK(verify_partition(cub, grouped).accepted);

    PartitionScheme split{1, {{0}, {1}, {2}}};
    auto bad = verify_partition(cub, split);
    CHECK_FALSE(bad.accepted); // images of F_0 and F_1 overlap across groups
    CHECK(bad.violations.size() == 1);

    PartitionScheme singles{1, {{0}, {1}}};
    CHECK(verify_partition(cantor(), singles).accepted);

    auto dup = dup_binary();
    CHECK(verify_partition(dup, PartitionScheme{1, {{0}, {1, 2}}}).accepted);
    CHECK_FALSE(verify_partition(dup, PartitionScheme{1, {{0, 1}, {2}}}).accepted);

    CHECK_THROWS_AS(verify_partition(dup, PartitionScheme{1, {{0}, {1}}}),
                    std::invalid_argument); // does not cover I^q
}

TEST_CASE("default_partition finds the enclosure components") {
    auto singles = default_partition(cantor(), 1);
    CHECK(singles.groups.size() == 2);

    auto dup = default_partition(dup_binary(), 1);
    REQUIRE(dup.groups.size() == 2);
    std::size_t big = dup.groups[0].size() == 2 ? 0 : 1;
    CHECK(dup.groups[big].size() == 2);
    CHECK(dup.groups[1 - big] == std::vector<std::size_t>{0});

    auto cub = default_partition(cubic_family(0.25, 0.0), 1);
    REQUIRE(cub.groups.size() == 2);
    CHECK(verify_partition(cubic_family(0.25, 0.0), cub).accepted);

    auto pairs = default_partition(cantor(), 2);
    CHECK(pairs.groups.size() == 4); // all 2-word enclosures separated
}

TEST_CASE("qint lower bound values") {
    // Vacuous partition: single group of all q-words gives bound 0.
    auto dup = dup_binary();
    PartitionScheme all{1, {{0, 1, 2}}};
    auto mu = gibbs_from_weights(uniform(3));
    auto b = qint_lower_bound(dup, all, mu, -kLog2);
    CHECK(b.value == doctest::Approx(0.0).epsilon(1e-12));

    // Duplicated binary with the true grouping: the bound is tight.
    PartitionScheme grouped{1, {{0}, {1, 2}}};
    auto tight = qint_lower_bound(dup, grouped, mu, -kLog2);
    CHECK(tight.value == doctest::Approx(0.9182958340544896).epsilon(1e-12));

    // Cubic family bound matches the displayed formula at eps = 0.
    auto cub = cubic_family(0.25, 0.0);
    PartitionScheme cg{1, {{0, 1}, {2}}};
    BernoulliWeights p({0.2, 0.5, 0.3});
    auto mu_p = gibbs_from_weights(p);
    double chi = std::log(0.25);
    auto qb = qint_lower_bound(cub, cg, mu_p, chi);
    double expect = (-(0.2 * std::log(0.2) + 0.5 * std::log(0.5) + 0.3 * std::log(0.3)) -
                     kLog2 * (0.2 + 0.5)) / std::abs(chi);
    CHECK(qb.value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("scm lower bound values") {
    auto cub = cubic_family(0.25, 0.0);
    PartitionScheme cg{1, {{0, 1}, {2}}};
    auto b = scm_lower_bound(cub, cg, uniform(3), -std::log(4.0));
    CHECK(b.value == doctest::Approx((kLog3 - (2.0 / 3.0) * kLog2) / std::log(4.0)).epsilon(1e-12));
    CHECK(b.value == doctest::Approx(0.4591479170272448).epsilon(1e-10));

    // All-singleton groups: the bound equals the naive value.
    auto mid = cantor();
    PartitionScheme singles{1, {{0}, {1}}};
    BernoulliWeights p({0.3, 0.7});
    double h = -(0.3 * std::log(0.3) + 0.7 * std::log(0.7));
    auto naive = scm_lower_bound(mid, singles, p, -kLog3);
    CHECK(naive.value == doctest::Approx(h / kLog3).epsilon(1e-12));
    CHECK_FALSE(naive.clamped);

    // Weights concentrated on a duplicated symbol: clamped at 0.
    auto dup = dup_binary();
    PartitionScheme grouped{1, {{0}, {1, 2}}};
    auto degenerate = scm_lower_bound(dup, grouped, BernoulliWeights({0.0, 1.0, 0.0}), -kLog2);
    CHECK(degenerate.value == 0.0);
    CHECK(degenerate.clamped);
}

TEST_CASE("property: qint and scm agree on Bernoulli inputs") {
    Rng rng(510);
    auto dup = dup_binary();
    PartitionScheme grouped{1, {{0}, {1, 2}}};
    for (int t = 0; t < 20; ++t) {
        double a = rng.uniform(0.05, 0.9);
        double b = rng.uniform(0.05, 1.0 - a - 0.025);
        BernoulliWeights p({a, b, 1.0 - a - b});
        double chi = -rng.uniform(0.5, 1.5);
        auto q1 = qint_lower_bound(dup, grouped, gibbs_from_weights(p), chi);
        auto s1 = scm_lower_bound(dup, grouped, p, chi);
        CHECK(q1.value == doctest::Approx(s1.value).epsilon(1e-12));
    }
}

TEST_CASE("dimension_drop decides on the bracket") {
    OverlapEstimate est;
    est.bracket_lo = 0.2;
    est.bracket_hi = 0.5;
    auto f = dimension_drop(est);
    CHECK(f.drop);
    CHECK_FALSE(f.separated);
    CHECK_FALSE(f.inconclusive);

    est.bracket_lo = -0.01;
    est.bracket_hi = 0.02;
    f = dimension_drop(est);
    CHECK(f.separated);
    CHECK_FALSE(f.drop);

    est.truncated_samples = 3;
    f = dimension_drop(est);
    CHECK(f.inconclusive);
    CHECK_FALSE(f.drop);
    CHECK_FALSE(f.separated);
}

TEST_CASE("property: drop flags are mutually exclusive and exhaustive") {
    Rng rng(2222);
    for (int t = 0; t < 200; ++t) {
        OverlapEstimate est;
        est.bracket_lo = rng.uniform(-0.5, 0.5);
        est.bracket_hi = est.bracket_lo + rng.uniform(0.0, 0.5);
        est.truncated_samples = rng.next_u64() % 4 == 0 ? 1 : 0;
        auto f = dimension_drop(est);
        CHECK(int(f.drop) + int(f.separated) + int(f.inconclusive) == 1);
    }
}

TEST_CASE("self_conformal_dimension on the three affine fixtures") {
    DimensionOptions opt;
    opt.overlap.n = 10;
    opt.overlap.samples = 400;
    opt.overlap.seed = 99;

    auto rc = self_conformal_dimension(cantor(), uniform(2), opt);
    CHECK(std::abs(rc.hd - 0.6309297535714574) < 0.03);
    CHECK(rc.flags.separated);
    CHECK(rc.hd_naive == doctest::Approx(kLog2 / kLog3).epsilon(1e-12));

    auto rd = self_conformal_dimension(dup_binary(), uniform(3), opt);
    CHECK(std::abs(rd.hd - 0.9182958340544896) < 0.04);
    CHECK(rd.flags.drop);
    CHECK_FALSE(rd.flags.separated);

    auto r0 = self_conformal_dimension(coincident(), uniform(2), opt);
    CHECK(r0.hd == 0.0);
    CHECK(r0.flags.drop);
}

TEST_CASE("property: ordering chain bound <= hd <= naive") {
    DimensionOptions opt;
    opt.overlap.n = 10;
    opt.overlap.samples = 300;
    opt.overlap.seed = 12;
    opt.partition_q = 1;
    auto rep = self_conformal_dimension(dup_binary(), uniform(3), opt);
    REQUIRE(rep.bound.has_value());
    double slack = 3.0 * (rep.overlap.std_error + rep.chi_err) + 1e-9;
    CHECK(*rep.bound <= rep.hd + slack);
    CHECK(rep.hd <= rep.hd_naive + 1e-12);
}

TEST_CASE("property: scale covariance of the dimension formula") {
    DimensionOptions opt;
    opt.overlap.n = 10;
    opt.overlap.samples = 300;
    opt.overlap.seed = 31;
    auto base = self_conformal_dimension(cantor(), uniform(2), opt);
    auto squared = self_conformal_dimension(
        cantor_affine({1.0 / 9.0, 1.0 / 9.0}, {0.0, 2.0 / 3.0}), uniform(2), opt);
    CHECK(squared.h == base.h);
    CHECK(squared.chi == doctest::Approx(2.0 * base.chi).epsilon(1e-14));
    CHECK(std::abs(2.0 * squared.hd - base.hd) < 0.05);
    CHECK(std::abs(squared.log_o - base.log_o) < 0.02); // both OSC, near 0
}

TEST_CASE("property: beta counts obey the partition product bound") {
    struct CaseDef {
        IfsSystem sys;
        std::size_t q;
    };
    std::vector<CaseDef> cases;
    cases.push_back({cantor(), 1});
    cases.push_back({cantor(), 2});
    cases.push_back({dup_binary(), 1});
    cases.push_back({coincident(), 1});
    cases.push_back({cubic_family(0.25, 0.0), 1});
    for (auto& cd : cases) {
        auto scheme = default_partition(cd.sys, cd.q);
        REQUIRE(verify_partition(cd.sys, scheme).accepted);
        const std::size_t m = cd.sys.alphabet_size();
        auto owner = scheme.group_of_word(word_count_pow(m, cd.q, 100'000));
        auto cards = scheme.cardinalities();
        MembershipTester tester(cd.sys);
        auto unif = gibbs_from_weights(uniform(m));
        const std::size_t blocks = 4;
        const std::size_t qn = cd.q * blocks;
        for (int t = 0; t < 25; ++t) {
            Rng rng = Rng::stream(808, t);
            Word w = unif.sample_word(qn + 30, rng);
            Point x = pi_point(cd.sys, w).point;
            double bound = 1.0;
            for (std::size_t b = 0; b < blocks; ++b) {
                std::size_t idx = 0;
                for (std::size_t i = 0; i < cd.q; ++i) idx = idx * m + w[b * cd.q + i];
                bound *= double(cards[owner[idx]]);
            }
            auto counts = tester.beta_counts(x, qn);
            CHECK(double(counts.upper) <= bound + 0.5);
        }
    }
}

TEST_CASE("mixed z^2/z^3 measure dimension matches the digit-mixing oracle") {
    // Projected uniform-5 Bernoulli measure: each point has one branch per
    // map, so log o = log 2, chi = -(2 log 2 + 3 log 3)/5, and
    // HD = (log 5 - log 2) / |chi|.
    JuliaSpec spec;
    spec.maps.push_back({2});
    spec.maps.push_back({3});
    auto sys = mixed_julia(spec);
    DimensionOptions opt;
    opt.overlap.n = 6;
    opt.overlap.samples = 150;
    opt.overlap.seed = 71;
    auto rep = self_conformal_dimension(sys, uniform(5), opt);
    double chi = -(2.0 * kLog2 + 3.0 * kLog3) / 5.0;
    double expect = (std::log(5.0) - kLog2) / std::abs(chi);
    CHECK(std::abs(rep.log_o - kLog2) < 1e-9);
    CHECK(std::abs(rep.chi - chi) <= 3.0 * rep.chi_err + 1e-6);
    CHECK(std::abs(rep.hd - expect) < 0.02);
    CHECK(rep.flags.drop);
}

TEST_CASE("empirical pointwise dimension on the fixtures") {
    EmpiricalOptions eo;
    eo.points = 4000;
    eo.seed = 404;

    auto mu2 = gibbs_from_weights(uniform(2));
    auto ec = empirical_pointwise_dimension(cantor(), mu2, eo);
    CHECK(std::abs(ec.median - 0.6309) < 0.06);
    CHECK(ec.iqr < 0.12);

    auto mu3 = gibbs_from_weights(uniform(3));
    auto ed = empirical_pointwise_dimension(dup_binary(), mu3, eo);
    CHECK(std::abs(ed.median - 0.9183) < 0.06);
    // The binary(1/3, 2/3) measure has genuine local-slope spread at these
    // scales (~0.47/sqrt(window) per pivot), so its IQR sits near 0.25.
    CHECK(ed.iqr < 0.35);

    auto e0 = empirical_pointwise_dimension(coincident(), mu2, eo);
    CHECK(e0.median == 0.0);
    CHECK(e0.iqr == 0.0);

    // kappa_max^40 above the ladder top leaves fewer than 4 rungs.
    auto slow = cantor_affine({0.95}, {0.02});
    CHECK_THROWS_AS(empirical_pointwise_dimension(slow, gibbs_from_weights(BernoulliWeights({1.0})), eo),
                    std::runtime_error);
}
