#include "doctest.h"

#include <cmath>

#include "ifsdim/ifs_system.hpp"
#include "ifsdim/rng.hpp"
#include "ifsdim/systems.hpp"

using namespace ifsdim;

namespace {

IfsSystem cantor() { return cantor_affine({1.0 / 3.0, 1.0 / 3.0}, {0.0, 2.0 / 3.0}); }
IfsSystem binary() { return cantor_affine({0.5, 0.5}, {0.0, 0.5}); }
IfsSystem dup_binary() { return cantor_affine({0.5, 0.5, 0.5}, {0.0, 0.5, 0.5}); }

Word random_word(Rng& rng, std::size_t len, std::size_t m) {
    std::vector<Symbol> s(len);
    for (auto& c : s) c = static_cast<Symbol>(rng.next_u64() % m);
    return Word(std::move(s));
}

} // namespace

TEST_CASE("apply_map evaluates each variant") {
    auto sys = cantor();
    CHECK(apply_map(sys, 0, {1.0, 0.0}).real() == doctest::Approx(1.0 / 3.0));

    auto cub = cubic_family(0.25, 0.0);
    CHECK(apply_map(cub, 1, {0.0, 0.0}).real() == doctest::Approx(0.25));

    JuliaSpec js;
    js.maps.push_back({2});
    auto jul = mixed_julia(js);
    Point w = apply_map(jul, 0, {1.0, 0.0});
    CHECK(std::abs(w - Point{1.0, 0.0}) < 1e-12);
}

TEST_CASE("apply_map rejects bad inputs") {
    auto sys = cantor();
    CHECK_THROWS_AS(apply_map(sys, 2, {0.5, 0.0}), std::out_of_range);
    CHECK_THROWS_AS(apply_map(sys, 0, {1.5, 0.0}), std::domain_error);
}

TEST_CASE("apply_word composes with the first symbol outermost") {
    auto sys = cantor();
    // phi_0(phi_1(0)) = (2/3)/3 = 2/9
    CHECK(apply_word(sys, Word{0, 1}, {0.0, 0.0}).real() == doctest::Approx(2.0 / 9.0));
    CHECK(apply_word(sys, Word{}, {0.37, 0.0}).real() == doctest::Approx(0.37));

    auto bin = binary();
    CHECK(apply_word(bin, Word{1, 0, 0}, {0.0, 0.0}).real() == doctest::Approx(0.5));
}

TEST_CASE("word_derivative_modulus follows the chain rule values") {
    auto sys = cantor();
    CHECK(word_derivative_modulus(sys, Word{0, 1, 1, 0}, {0.2, 0.0}) ==
          doctest::Approx(std::pow(1.0 / 3.0, 4)));

    auto cub0 = cubic_family(0.25, 0.0);
    CHECK(word_derivative_modulus(cub0, Word{2, 0, 1}, {0.1, 0.0}) ==
          doctest::Approx(std::pow(0.25, 3)));

    auto cub = cubic_family(0.25, 1e-3);
    CHECK(word_derivative_modulus(cub, Word{0}, {0.5, 0.0}) == doctest::Approx(0.25175));
}

TEST_CASE("enclosure covers hand-computed images") {
    auto sys = cantor();
    Box e0 = enclosure(sys, Word{0});
    CHECK(e0.x.lo == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e0.x.hi == doctest::Approx(1.0 / 3.0));

    Box e11 = enclosure(sys, Word{1, 1});
    CHECK(e11.x.lo == doctest::Approx(8.0 / 9.0));
    CHECK(e11.x.hi == doctest::Approx(1.0));

    auto bin = binary();
    Box e01 = enclosure(bin, Word{0, 1});
    CHECK(e01.x.lo == doctest::Approx(0.25));
    CHECK(e01.x.hi == doctest::Approx(0.5));
}

TEST_CASE("limit_set_cover enumerates cylinder images") {
    auto sys = cantor();
    auto cov1 = limit_set_cover(sys, 1);
    REQUIRE(cov1.size() == 2);
    CHECK(cov1[0].second.x.hi == doctest::Approx(1.0 / 3.0));
    CHECK(cov1[1].second.x.lo == doctest::Approx(2.0 / 3.0));

    auto dup = dup_binary();
    auto covd = limit_set_cover(dup, 1);
    REQUIRE(covd.size() == 3);
    CHECK(covd[0].second.x.hi == doctest::Approx(0.5));
    CHECK(covd[1].second.x.lo == doctest::Approx(0.5));
    CHECK(covd[2].second.x.lo == doctest::Approx(0.5));

    auto cov0 = limit_set_cover(sys, 0);
    REQUIRE(cov0.size() == 1);
    CHECK(cov0[0].second.x.lo == 0.0);
    CHECK(cov0[0].second.x.hi == 1.0);

    CHECK_THROWS_AS(limit_set_cover(sys, 40), std::length_error);
}

TEST_CASE("pi_point tracks codings with the stated radius") {
    auto sys = cantor();
    Word zeros(std::vector<Symbol>(20, 0));
    auto p = pi_point(sys, zeros);
    CHECK(std::abs(p.point.real()) <= p.radius);
    CHECK(p.radius == doctest::Approx(std::pow(1.0 / 3.0, 20)));

    auto bin = binary();
    std::vector<Symbol> alt;
    for (int i = 0; i < 10; ++i) { alt.push_back(1); alt.push_back(0); }
    auto q = pi_point(bin, Word(alt));
    CHECK(std::abs(q.point.real() - 2.0 / 3.0) <= q.radius + 1e-15);
    CHECK(q.radius == doctest::Approx(std::pow(0.5, 20)));

    auto r = pi_point(sys, Word{1});
    CHECK(r.point.real() >= 2.0 / 3.0 - 1e-12);
    CHECK(r.point.real() <= 1.0 + 1e-12);
    CHECK(r.radius <= 1.0 / 3.0 + 1e-12);
}

TEST_CASE("contraction_bounds for affine and cubic systems") {
    auto sys = cantor();
    auto b = sys.contraction_bounds();
    CHECK(b.kappa_min == doctest::Approx(1.0 / 3.0));
    CHECK(b.kappa_max == doctest::Approx(1.0 / 3.0));
    CHECK(b.distortion == 1.0);

    auto cub0 = cubic_family(0.25, 0.0);
    auto b0 = cub0.contraction_bounds();
    CHECK(b0.kappa_min == doctest::Approx(0.25));
    CHECK(b0.kappa_max == doctest::Approx(0.25));
    CHECK(b0.distortion == 1.0);

    auto cub = cubic_family(0.25, 1e-3);
    auto bc = cub.contraction_bounds();
    // Interval evaluation of lambda + 2*eps*x + 3*eps*x^2 over [0, 1.1].
    CHECK(bc.kappa_min == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(bc.kappa_max == doctest::Approx(0.25 + 2e-3 * 1.1 + 3e-3 * 1.21).epsilon(1e-2));
    CHECK(bc.kappa_max < 0.26);
    CHECK(bc.distortion > 1.0);
    CHECK(bc.distortion < 1.5);
}

TEST_CASE("non-contracting systems are rejected") {
    CHECK_THROWS_AS(cantor_affine({1.1}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(cantor_affine({0.5}, {0.8}), std::invalid_argument); // image leaves V
}

TEST_CASE("property: composition order") {
    auto sys = dup_binary();
    Rng rng(2024);
    for (int t = 0; t < 200; ++t) {
        Word u = random_word(rng, rng.next_u64() % 6, 3);
        Word v = random_word(rng, rng.next_u64() % 6, 3);
        Point x{rng.uniform(), 0.0};
        Point lhs = apply_word(sys, u.concat(v), x);
        Point rhs = apply_word(sys, u, apply_word(sys, v, x));
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("property: enclosure nesting") {
    for (const auto& sys : {cantor(), dup_binary(), cubic_family(0.25, 1e-3)}) {
        Rng rng(7);
        for (int t = 0; t < 100; ++t) {
            Word u = random_word(rng, 1 + rng.next_u64() % 5, sys.alphabet_size());
            Word v = random_word(rng, rng.next_u64() % 5, sys.alphabet_size());
            Box inner = enclosure(sys, u.concat(v));
            Box outer = enclosure(sys, u);
            CHECK(inner.contained_in(outer, 1e-10));
        }
    }
}

TEST_CASE("property: points stay inside enclosures") {
    for (const auto& sys : {cantor(), dup_binary(), cubic_family(0.25, 1e-3)}) {
        Rng rng(11);
        const Ival v = sys.seed().box.x;
        for (int t = 0; t < 1000; ++t) {
            Word w = random_word(rng, 1 + rng.next_u64() % 12, sys.alphabet_size());
            Point x{rng.uniform(v.lo, v.hi), 0.0};
            Point img = apply_word(sys, w, x);
            CHECK(enclosure(sys, w).contains(img, 1e-12));
        }
    }
}

TEST_CASE("property: derivative chain rule") {
    auto sys = cubic_family(0.25, 1e-3);
    Rng rng(13);
    const Ival v = sys.seed().box.x;
    for (int t = 0; t < 200; ++t) {
        Word u = random_word(rng, 1 + rng.next_u64() % 6, 3);
        Word w = random_word(rng, 1 + rng.next_u64() % 6, 3);
        Point x{rng.uniform(v.lo, v.hi), 0.0};
        double lhs = word_derivative_modulus(sys, u.concat(w), x);
        double rhs = word_derivative_modulus(sys, u, apply_word(sys, w, x)) *
                     word_derivative_modulus(sys, w, x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("property: pi_point consistency under extension") {
    for (const auto& sys : {cantor(), dup_binary()}) {
        Rng rng(17);
        for (int t = 0; t < 200; ++t) {
            Word w = random_word(rng, 1 + rng.next_u64() % 10, sys.alphabet_size());
            auto base = pi_point(sys, w);
            for (Symbol j = 0; j < sys.alphabet_size(); ++j) {
                auto ext = pi_point(sys, w.appended(j));
                CHECK(std::abs(ext.point - base.point) <= base.radius + 1e-15);
            }
        }
    }
}
