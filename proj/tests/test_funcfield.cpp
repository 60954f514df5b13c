#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ffdyn/factor.hpp"
#include "ffdyn/parser.hpp"
#include "ffdyn/places.hpp"
#include "test_util.hpp"

using namespace ffdyn;
using testutil::Rng;

namespace {
const ConstantField Q = ConstantField::Q();

RatFunc rf(const std::string& s, const ConstantField& f = Q) { return parse_rat_func(s, f); }
Place pl(const std::string& s, const ConstantField& f = Q) { return parse_place(s, f); }
} // namespace

TEST_CASE("parse_rat_func basics") {
    RatFunc a = rf("(t^2+1)/(t-1)");
    CHECK(a.num() == rf("t^2+1").num());
    CHECK(a.den() == rf("t-1").num());

    CHECK(rf("t/t").is_one());
    CHECK(rf("(t^2-1)/(t-1)") == rf("t+1"));

    // 2 == 0 in F_2, so the denominator collapses to the zero polynomial
    ConstantField F2 = ConstantField::Fp(2);
    CHECK_THROWS_AS(parse_rat_func("(2*t+4)/2", F2), std::invalid_argument);

    CHECK_THROWS_AS(parse_rat_func("t +* 1", Q), std::invalid_argument);
    CHECK_THROWS_AS(parse_rat_func("1/(t-t)", Q), std::invalid_argument);
}

TEST_CASE("ord at finite and infinite places") {
    RatFunc a = rf("t^2/(t-1)");
    CHECK(ord(a, pl("t")) == 2);
    CHECK(ord(a, pl("t-1")) == -1);
    CHECK(ord(a, Place::infinity(Q)) == -1);
    CHECK(ord(rf("(t^2+1)/t"), pl("t^2+1")) == 1);
    CHECK_THROWS_AS(ord(RatFunc::zero(Q), pl("t")), std::invalid_argument);
}

TEST_CASE("log_abs weighting by residue degree") {
    CHECK(log_abs(rf("t"), pl("t")) == Rat(-1));
    CHECK(log_abs(rf("t"), Place::infinity(Q)) == Rat(1));
    CHECK(log_abs(rf("t^2+1"), pl("t^2+1")) == Rat(-2));
}

TEST_CASE("support") {
    auto s = support(rf("t^2/(t-1)"));
    REQUIRE(s.size() == 3);
    // deterministic order: finite places by (degree, coefficients), inf last
    CHECK(s[0].first == pl("t-1"));
    CHECK(s[0].second == -1);
    CHECK(s[1].first == pl("t"));
    CHECK(s[1].second == 2);
    CHECK(s[2].first.is_infinite());
    CHECK(s[2].second == -1);

    CHECK(support(rf("5")).empty());

    ConstantField F5 = ConstantField::Fp(5);
    auto s5 = support(parse_rat_func("t^2+1", F5));
    REQUIRE(s5.size() == 3);
    CHECK(s5[0].first == pl("t+2", F5));
    CHECK(s5[0].second == 1);
    CHECK(s5[1].first == pl("t+3", F5));
    CHECK(s5[1].second == 1);
    CHECK(s5[2].first.is_infinite());
    CHECK(s5[2].second == -2);
}

TEST_CASE("product formula worked examples") {
    CHECK(product_formula_sum(rf("(t^2+1)/t")) == 0);
    CHECK(product_formula_sum(rf("7")) == 0);
    CHECK(product_formula_sum(rf("t^3*(t-1)^2/(t^2+1)")) == 0);
}

TEST_CASE("product formula random battery") {
    for (unsigned long p : {0ul, 5ul, 2ul}) {
        ConstantField f = p == 0 ? Q : ConstantField::Fp(p);
        Rng rng(20240801 + p);
        for (int i = 0; i < 60; ++i) {
            RatFunc a = testutil::random_ratfunc(f, rng, 6);
            CHECK(product_formula_sum(a) == 0);
        }
    }
}

TEST_CASE("residue") {
    CHECK(residue(rf("(t+1)/(t+2)"), pl("t")) == Poly::constant(Q, Rat(1) / 2));
    CHECK(residue(rf("t"), pl("t")).is_zero());
    CHECK_THROWS_AS(residue(rf("1/t"), pl("t")), std::invalid_argument);
    // infinite place: leading coefficient ratio
    CHECK(residue(rf("(3*t^2+1)/(2*t^2-t)"), Place::infinity(Q)) == Poly::constant(Q, Rat(3) / 2));
    // degree-2 residue field
    CHECK(residue(rf("t^3"), pl("t^2+1")) == (Poly::variable(Q).pow(3) % pl("t^2+1").prime()));
}

TEST_CASE("ord is additive, residue multiplicative") {
    for (unsigned long p : {0ul, 5ul}) {
        ConstantField f = p == 0 ? Q : ConstantField::Fp(p);
        Rng rng(99 + p);
        Place v = p == 0 ? pl("t-1") : pl("t+1", f);
        Place w = Place::infinity(f);
        for (int i = 0; i < 100; ++i) {
            RatFunc a = testutil::random_ratfunc(f, rng, 4);
            RatFunc b = testutil::random_ratfunc(f, rng, 4);
            CHECK(ord(a * b, v) == ord(a, v) + ord(b, v));
            CHECK(ord(a * b, w) == ord(a, w) + ord(b, w));
            CHECK(log_abs(a * b, v) == log_abs(a, v) + log_abs(b, v));
            RatFunc s = a + b;
            if (!s.is_zero())
                CHECK(ord(s, v) >= std::min(ord(a, v), ord(b, v)));
            if (ord(a, v) >= 0 && ord(b, v) >= 0) {
                Poly ra = residue(a, v), rb = residue(b, v);
                CHECK(residue(a * b, v) == (ra * rb) % v.prime());
            }
        }
    }
}

TEST_CASE("factorization roundtrip") {
    for (unsigned long p : {0ul, 2ul, 3ul, 7ul}) {
        ConstantField f = p == 0 ? Q : ConstantField::Fp(p);
        Rng rng(7 + p);
        for (int trial = 0; trial < 12; ++trial) {
            Poly prod = Poly::one(f);
            int pieces = static_cast<int>(rng.range(1, 3));
            for (int i = 0; i < pieces; ++i) {
                Poly g = testutil::random_poly(f, rng, 3, true);
                int e = static_cast<int>(rng.range(1, 2));
                prod = prod * g.pow(static_cast<unsigned long>(e));
            }
            auto fac = factorize(prod);
            Poly back = Poly::constant(f, fac.unit);
            for (const auto& [g, e] : fac.factors) {
                CHECK(is_irreducible(g));
                CHECK(g.is_monic());
                back = back * g.pow(static_cast<unsigned long>(e));
            }
            CHECK(back == prod);
        }
    }
}

TEST_CASE("zassenhaus recombination handles products of many linear factors") {
    // (t-1)(t-2)...(t-8)(t^2+1): mod small primes this splits into many factors
    Poly prod = Poly::one(Q);
    for (long k = 1; k <= 8; ++k)
        prod = prod * Poly(Q, {Rat(-k), Rat(1)});
    prod = prod * Poly(Q, {Rat(1), Rat(0), Rat(1)});
    auto fac = factorize(prod);
    CHECK(fac.factors.size() == 9);
    Poly back = Poly::constant(Q, fac.unit);
    for (const auto& [g, e] : fac.factors) back = back * g.pow(static_cast<unsigned long>(e));
    CHECK(back == prod);
}

TEST_CASE("find_irreducible") {
    ConstantField F2 = ConstantField::Fp(2);
    Poly f = find_irreducible(F2, 3);
    CHECK(f.degree() == 3);
    CHECK(is_irreducible(f));
}

TEST_CASE("poly_sqrt") {
    Poly g = rf("t^2+3*t+1").num();
    CHECK(poly_sqrt(g * g).has_value());
    bool matches = (*poly_sqrt(g * g) == g) || (*poly_sqrt(g * g) == -g);
    CHECK(matches);
    CHECK(!poly_sqrt(rf("t^2+1").num().mul_scalar(Rat(-1))).has_value());
    CHECK(!poly_sqrt(rf("1-4*t").num()).has_value());
}
