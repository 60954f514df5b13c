#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ffdyn/parser.hpp"
#include "ffdyn/resultant.hpp"
#include "test_util.hpp"

using namespace ffdyn;
using testutil::Rng;

namespace {
const ConstantField Q = ConstantField::Q();

RatFunc rf(const std::string& s) { return parse_rat_func(s, Q); }

HomogMap diag2(const RatFunc& a, const RatFunc& b) {
    HomogMap phi(Q, 2, 2);
    phi.set_coeff(0, {2, 0}, a);
    phi.set_coeff(1, {0, 2}, b);
    return phi;
}

LinearMap random_invertible(const ConstantField& F, int n, Rng& rng) {
    for (;;) {
        LinearMap g(F, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Poly p(F, {testutil::random_scalar(F, rng, 4), testutil::random_scalar(F, rng, 1)});
                g.at(i, j) = RatFunc(p);
            }
        if (!g.det().is_zero()) return g;
    }
}

} // namespace

TEST_CASE("resultant of linear maps is the determinant") {
    CHECK(resultant(HomogMap::from_linear(LinearMap::identity(Q, 2))).value == rf("1"));
    CHECK(resultant(HomogMap::from_linear(LinearMap::identity(Q, 3))).value == rf("1"));
    Rng rng(123);
    for (int n = 2; n <= 3; ++n) {
        for (int trial = 0; trial < 15; ++trial) {
            LinearMap g = random_invertible(Q, n, rng);
            CHECK(resultant(HomogMap::from_linear(g)).value == g.det());
        }
    }
}

TEST_CASE("worked resultants at N=1, d=2") {
    CHECK(resultant(diag2(rf("1"), rf("1"))).value == rf("1"));
    CHECK(resultant(diag2(rf("1"), rf("t"))).value == rf("t^2"));
    // diagonal forms (a x0^2, b x1^2) give a^2 b^2
    CHECK(resultant(diag2(rf("t+1"), rf("t-2"))).value == rf("(t+1)^2*(t-2)^2"));
    CHECK(resultant(HomogMap::diagonal_power(Q, 2, 3)).value == rf("1"));
    CHECK(resultant(HomogMap::diagonal_power(Q, 3, 2)).value == rf("1"));
}

TEST_CASE("Res = 0 iff singular, with the brute-force oracle") {
    // planted common root over F_3: both forms vanish at (1, 0)
    ConstantField F3 = ConstantField::Fp(3);
    HomogMap phi(F3, 2, 2);
    phi.set_coeff(0, {1, 1}, RatFunc::one(F3));
    phi.set_coeff(1, {1, 1}, RatFunc::one(F3));
    CHECK(resultant(phi).value.is_zero());
    auto root = common_root_oracle(phi, 1);
    REQUIRE(root.has_value());

    HomogMap sq = HomogMap::diagonal_power(F3, 2, 2);
    CHECK(!resultant(sq).value.is_zero());
    CHECK(!common_root_oracle(sq, 1).has_value());
    CHECK(!common_root_oracle(sq, 2).has_value());

    // degenerate map: flagged, resultant zero, oracle finds a root
    HomogMap degen(F3, 2, 2);
    degen.set_coeff(1, {1, 1}, RatFunc::one(F3));
    auto r = resultant(degen);
    CHECK(r.degenerate);
    CHECK(r.value.is_zero());
    CHECK(common_root_oracle(degen, 1).has_value());
}

TEST_CASE("resultant-vanishing vs common-root battery over small prime fields") {
    for (unsigned long p : {3ul, 5ul}) {
        ConstantField F = ConstantField::Fp(p);
        Rng rng(1000 + p);
        for (int nvars = 2; nvars <= 3; ++nvars) {
            for (int trial = 0; trial < 7; ++trial) {
                // random constant-coefficient quadratic map
                HomogMap phi(F, nvars, 2);
                std::vector<Monomial> monos;
                for (int i = 0; i < nvars; ++i)
                    for (int j = i; j < nvars; ++j) {
                        Monomial m(static_cast<size_t>(nvars), 0);
                        m[static_cast<size_t>(i)] += 1;
                        m[static_cast<size_t>(j)] += 1;
                        monos.push_back(m);
                    }
                for (int i = 0; i < nvars; ++i)
                    for (const auto& m : monos)
                        phi.set_coeff(i, m, RatFunc::constant(F, testutil::random_scalar(F, rng)));
                if (phi.is_degenerate()) continue;
                bool singular = resultant(phi).value.is_zero();
                bool found = common_root_oracle(phi, 1).has_value() || common_root_oracle(phi, 2).has_value();
                if (found) CHECK(singular);
                // over an algebraically closed field singular would imply a
                // root; up to degree-2 extensions we only get one direction,
                // but planted-root instances must always be caught:
                if (!singular) CHECK(!found);
            }
        }
    }
}

TEST_CASE("planted common roots force Res = 0") {
    ConstantField F5 = ConstantField::Fp(5);
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        // plant the root (0, ..., 0, 1): drop the pure x_{N}^2 monomial
        int nvars = 2 + static_cast<int>(rng.range(0, 1));
        HomogMap phi(F5, nvars, 2);
        for (int i = 0; i < nvars; ++i)
            for (int a = 0; a < nvars; ++a)
                for (int b = a; b < nvars; ++b) {
                    if (a == nvars - 1 && b == nvars - 1) continue;
                    Monomial m(static_cast<size_t>(nvars), 0);
                    m[static_cast<size_t>(a)] += 1;
                    m[static_cast<size_t>(b)] += 1;
                    phi.set_coeff(i, m, RatFunc::constant(F5, testutil::random_scalar(F5, rng)));
                }
        if (phi.is_degenerate()) continue;
        CHECK(resultant(phi).value.is_zero());
        auto root = common_root_oracle(phi, 1);
        REQUIRE(root.has_value());
    }
}

TEST_CASE("res_ord normalizes content first") {
    Place vt = parse_place("t", Q);
    CHECK(res_ord(diag2(rf("1"), rf("1")), vt) == 0);
    CHECK(res_ord(diag2(rf("1"), rf("t")), vt) == 2);
    CHECK(res_ord(diag2(rf("t"), rf("t")), vt) == 0);
    CHECK_THROWS_AS(res_ord(HomogMap(Q, 2, 2), vt), std::invalid_argument);
}

TEST_CASE("scaling exponent law on the supported grid") {
    CHECK(scaling_exponent_check(1, 1));
    CHECK(scaling_exponent_check(1, 2));
    CHECK(scaling_exponent_check(1, 3));
    CHECK(scaling_exponent_check(2, 2));
    CHECK_THROWS_AS(scaling_exponent_check(3, 2), std::invalid_argument);
    // worked instance: Res(c (x0^2, t x1^2)) = c^4 t^2
    RatFunc c = rf("t-3");
    CHECK(resultant(diag2(rf("1"), rf("t")).scale(c)).value == c.pow(4) * rf("t^2"));
}

TEST_CASE("composition law exponents: fit and freeze") {
    auto e122 = fit_composition_exponents(1, 2, 2);
    CHECK(e122.a == 2);
    CHECK(e122.b == 4);
    auto e123 = fit_composition_exponents(1, 2, 3);
    CHECK(e123.a == 3);
    CHECK(e123.b == 4);
    auto e222 = fit_composition_exponents(2, 2, 2);
    CHECK(e222.a == 4);
    CHECK(e222.b == 8);
    // worked check: ord_t Res((x0^2,x1^2) ∘ (x0^2,t x1^2)) = b * 2
    HomogMap outer = diag2(rf("1"), rf("1"));
    HomogMap inner = diag2(rf("1"), rf("t"));
    Place vt = parse_place("t", Q);
    CHECK(ord(resultant(outer.compose(inner)).value, vt) == e122.b * 2);
    // degenerate linear case: identity-like diagonals on both sides
    CHECK(resultant(HomogMap::diagonal_power(Q, 2, 4)).value == rf("1"));
    CHECK_THROWS_AS(fit_composition_exponents(1, 4, 4), std::invalid_argument);
}

TEST_CASE("conjugation exponents derived from the fits") {
    auto ce12 = conjugation_exponents(1, 2);
    CHECK(ce12.B == 1);
    CHECK(ce12.A == 2); // d^N (d-1) at N=1, d=2
    auto ce13 = conjugation_exponents(1, 3);
    CHECK(ce13.A == 6);
    CHECK(ce13.B == 1);
    // spot check: Res(g^{-1} phi g) = det(g)^A Res(phi)^B on a worked pair
    HomogMap tw = diag2(rf("1"), rf("t"));
    LinearMap g = LinearMap::diagonal({rf("1"), rf("1/t")});
    RatFunc lhs = resultant(conjugate(tw, g)).value;
    RatFunc rhs = g.det().pow(ce12.A) * resultant(tw).value.pow(ce12.B);
    CHECK(lhs == rhs);
}

TEST_CASE("resultant of integral maps is integral (ultrametric)") {
    Rng rng(404);
    Place vt = parse_place("t", Q);
    for (int trial = 0; trial < 10; ++trial) {
        HomogMap phi(Q, 2, 2);
        for (int i = 0; i < 2; ++i)
            for (const Monomial& m : {Monomial{2, 0}, Monomial{1, 1}, Monomial{0, 2}}) {
                Poly p(Q, {testutil::random_scalar(Q, rng, 3), testutil::random_scalar(Q, rng, 2)});
                phi.set_coeff(i, m, RatFunc(p));
            }
        if (phi.is_degenerate()) continue;
        RatFunc r = resultant(phi).value;
        if (r.is_zero()) continue;
        CHECK(ord(r, vt) >= 0);
    }
}

TEST_CASE("vanishing-minor fallback still computes the resultant") {
    // Forms chosen so x2^2 never appears: the Macaulay minor degenerates
    // for this support pattern while the map stays nonsingular.
    HomogMap phi(Q, 3, 2);
    phi.set_coeff(0, {0, 1, 1}, rf("1"));
    phi.set_coeff(1, {1, 0, 1}, rf("1"));
    phi.set_coeff(2, {1, 1, 0}, rf("1"));
    // x0 x1, x0 x2, x1 x2 have the only common zeros at coordinate points,
    // where some coordinate is 1; check a couple by hand: (1,0,0) kills
    // forms 0... it does not: form 2 = x0 x1 = 0, form 1 = x0 x2 = 0,
    // form 0 = x1 x2 = 0 -- all vanish, so this one IS singular.
    CHECK(resultant(phi).value.is_zero());

    // perturb to make it nonsingular but keep a sparse support
    phi.set_coeff(0, {2, 0, 0}, rf("1"));
    phi.set_coeff(1, {0, 2, 0}, rf("1"));
    phi.set_coeff(2, {0, 0, 2}, rf("t"));
    RatFunc r = resultant(phi).value;
    CHECK(!r.is_zero());
    // cross-check with a constant-conjugated copy: Res is invariant up to
    // det^A with A = d^N(d-1), and for det = 1 shears exactly equal
    LinearMap shear = LinearMap::identity(Q, 3);
    shear.at(0, 1) = rf("1");
    CHECK(resultant(conjugate(phi, shear)).value == r);
}
