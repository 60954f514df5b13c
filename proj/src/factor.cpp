#include "ffdyn/factor.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>

namespace ffdyn {

namespace {

bool poly_less(const Poly& a, const Poly& b) { return Poly::cmp(a, b) < 0; }

using FacMap = std::map<Poly, int, bool (*)(const Poly&, const Poly&)>;

FacMap make_facmap() { return FacMap(&poly_less); }

// ---------------------------------------------------------------------
// F_p machinery
// ---------------------------------------------------------------------

// p-th root of a monic g(t) = h(t^p): in F_p the coefficients are fixed by
// Frobenius, so the root just reindexes them.
Poly pth_root_fp(const Poly& g) {
    unsigned long p = g.field().p;
    std::vector<Rat> c;
    for (int i = 0; i <= g.degree(); i += static_cast<int>(p))
        c.push_back(g.coeff(i));
    return Poly(g.field(), c);
}

// Squarefree decomposition of a monic f over F_p.
void squarefree_fp(const Poly& f, FacMap& out, int mult) {
    if (f.degree() <= 0) return;
    Poly fp = f.derivative();
    if (fp.is_zero()) {
        squarefree_fp(pth_root_fp(f), out, mult * static_cast<int>(f.field().p));
        return;
    }
    Poly c = gcd(f, fp);
    Poly w = f.exact_div(c);
    int i = 1;
    while (!w.is_one()) {
        Poly y = gcd(w, c);
        Poly fac = w.exact_div(y);
        if (fac.degree() > 0) out[fac] += mult * i;
        w = y;
        c = c.exact_div(y);
        ++i;
    }
    if (c.degree() > 0) squarefree_fp(pth_root_fp(c), out, mult * static_cast<int>(f.field().p));
}

// Random monic polynomial of degree < n with deterministic seeding.
Poly random_poly_fp(const ConstantField& F, int n, std::mt19937_64& rng) {
    std::vector<Rat> c(static_cast<size_t>(n), Rat(0));
    for (auto& x : c) x = Rat(static_cast<unsigned long>(rng() % F.p));
    return Poly(F, c);
}

// Equal-degree splitting: f monic squarefree, all irreducible factors of
// degree d.  Cantor-Zassenhaus for odd p, trace method for p = 2.
void edf_fp(const Poly& f, int d, std::vector<Poly>& out, std::mt19937_64& rng) {
    if (f.degree() == d) {
        out.push_back(f);
        return;
    }
    const ConstantField& F = f.field();
    Poly g(F);
    for (;;) {
        Poly a = random_poly_fp(F, f.degree(), rng);
        if (a.degree() <= 0) continue;
        g = gcd(a, f);
        if (g.degree() > 0 && g.degree() < f.degree()) break;
        if (F.p == 2) {
            // trace map over F_{2^d}
            Poly tr = a % f, sq = a % f;
            for (int i = 1; i < d; ++i) {
                sq = (sq * sq) % f;
                tr = tr + sq;
            }
            g = gcd(tr, f);
        } else {
            Int e = 1;
            Int pz(F.p);
            for (int i = 0; i < d; ++i) e *= pz;
            e = (e - 1) / 2;
            Poly b = poly_powmod(a, e, f);
            g = gcd(b - Poly::one(F), f);
        }
        if (g.degree() > 0 && g.degree() < f.degree()) break;
    }
    edf_fp(g, d, out, rng);
    edf_fp(f.exact_div(g), d, out, rng);
}

// Distinct-degree then equal-degree factorization of monic squarefree f.
std::vector<Poly> factor_squarefree_fp(const Poly& f) {
    std::vector<Poly> out;
    if (f.degree() <= 0) return out;
    const ConstantField& F = f.field();
    // deterministic rng keyed on the polynomial
    unsigned long long seed = 0x9e3779b97f4a7c15ull ^ static_cast<unsigned long long>(f.degree());
    for (int i = 0; i <= f.degree(); ++i)
        seed = seed * 1099511628211ull + mpz_get_ui(Int(f.coeff(i).get_num()).get_mpz_t());
    std::mt19937_64 rng(seed);

    Poly rem = f;
    Poly h = Poly::variable(F) % rem;
    int d = 0;
    while (rem.degree() >= 2 * (d + 1)) {
        ++d;
        h = poly_powmod(h, Int(static_cast<unsigned long>(F.p)), rem);
        Poly g = gcd(h - Poly::variable(F), rem);
        if (g.degree() > 0) {
            edf_fp(g, d, out, rng);
            rem = rem.exact_div(g);
            h = h % rem;
        }
    }
    if (rem.degree() > 0) out.push_back(rem);
    return out;
}

// ---------------------------------------------------------------------
// Z[t] machinery for factoring over Q
// ---------------------------------------------------------------------

struct ZPoly {
    std::vector<Int> c; // ascending, trimmed

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    Int coeff(int i) const { return (i >= 0 && i < static_cast<int>(c.size())) ? c[i] : Int(0); }
};

ZPoly to_zpoly(const Poly& f, Int& denom_out) {
    Int den(1);
    for (int i = 0; i <= f.degree(); ++i) {
        Int d = f.coeff(i).get_den();
        Int g;
        mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
        den = den / g * d;
    }
    ZPoly z;
    for (int i = 0; i <= f.degree(); ++i) {
        Rat v = f.coeff(i) * Rat(den);
        z.c.push_back(v.get_num());
    }
    z.trim();
    denom_out = den;
    return z;
}

Int content_z(const ZPoly& f) {
    Int g(0);
    for (const auto& a : f.c) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
    return g;
}

ZPoly mul_z(const ZPoly& a, const ZPoly& b) {
    ZPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, Int(0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] += a.c[i] * b.c[j];
    r.trim();
    return r;
}

Poly zpoly_to_poly(const ZPoly& f, const ConstantField& F) {
    std::vector<Rat> c;
    c.reserve(f.c.size());
    for (const auto& a : f.c) c.emplace_back(a);
    return Poly(F, c);
}

Int sym_mod(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    if (r * 2 > m) r -= m;
    return r;
}

// Hensel lift: f = g*h mod p, s*g + u*h = 1 mod p, all in Z[t]; lifts the
// factorization and the Bezout pair from mod m to mod m^2.
struct LiftPair {
    ZPoly g, h, s, u;
};

ZPoly mod_z(const ZPoly& f, const Int& m) {
    ZPoly r = f;
    for (auto& a : r.c) a = sym_mod(a, m);
    r.trim();
    return r;
}

// division with monic divisor over Z/m (divisor leading coeff invertible mod m)
void divmod_mod(const ZPoly& a, const ZPoly& d, const Int& m, ZPoly& q, ZPoly& r) {
    Int lc = d.c.back() % m;
    if (lc < 0) lc += m;
    Int lcinv;
    if (mpz_invert(lcinv.get_mpz_t(), lc.get_mpz_t(), m.get_mpz_t()) == 0)
        throw std::runtime_error("hensel: non-invertible leading coefficient");
    r = mod_z(a, m);
    q.c.clear();
    if (r.degree() >= d.degree()) q.c.assign(r.degree() - d.degree() + 1, Int(0));
    while (!r.is_zero() && r.degree() >= d.degree()) {
        Int f = sym_mod(r.c.back() * lcinv, m);
        int k = r.degree() - d.degree();
        q.c[k] = f;
        for (int i = 0; i <= d.degree(); ++i)
            r.c[i + k] = sym_mod(r.c[i + k] - f * d.coeff(i), m);
        r.trim();
    }
    q.trim();
}

LiftPair hensel_step(const ZPoly& f, const LiftPair& in, const Int& m) {
    Int m2 = m * m;
    ZPoly e; // f - g*h
    {
        ZPoly gh = mul_z(in.g, in.h);
        e.c.assign(std::max(f.c.size(), gh.c.size()), Int(0));
        for (size_t i = 0; i < e.c.size(); ++i)
            e.c[i] = sym_mod((i < f.c.size() ? f.c[i] : Int(0)) - gh.coeff(static_cast<int>(i)), m2);
        e.trim();
    }
    ZPoly q, r;
    divmod_mod(mul_z(in.s, e), in.h, m2, q, r);
    ZPoly g1 = in.g, h1 = in.h;
    {
        ZPoly ue = mul_z(in.u, e), gq = mul_z(in.g, q);
        g1.c.resize(std::max({g1.c.size(), ue.c.size(), gq.c.size()}), Int(0));
        for (size_t i = 0; i < g1.c.size(); ++i)
            g1.c[i] = sym_mod(g1.coeff(static_cast<int>(i)) + ue.coeff(static_cast<int>(i)) + gq.coeff(static_cast<int>(i)), m2);
        g1.trim();
        h1.c.resize(std::max(h1.c.size(), r.c.size()), Int(0));
        for (size_t i = 0; i < h1.c.size(); ++i)
            h1.c[i] = sym_mod(h1.coeff(static_cast<int>(i)) + r.coeff(static_cast<int>(i)), m2);
        h1.trim();
    }
    // lift Bezout pair: b = s*g1 + u*h1 - 1
    ZPoly b;
    {
        ZPoly sg = mul_z(in.s, g1), uh = mul_z(in.u, h1);
        b.c.assign(std::max(sg.c.size(), uh.c.size()), Int(0));
        for (size_t i = 0; i < b.c.size(); ++i)
            b.c[i] = sym_mod(sg.coeff(static_cast<int>(i)) + uh.coeff(static_cast<int>(i)) - (i == 0 ? 1 : 0), m2);
        b.trim();
    }
    ZPoly c, dpoly;
    divmod_mod(mul_z(in.s, b), h1, m2, c, dpoly);
    ZPoly s1 = in.s, u1 = in.u;
    {
        s1.c.resize(std::max(s1.c.size(), dpoly.c.size()), Int(0));
        for (size_t i = 0; i < s1.c.size(); ++i)
            s1.c[i] = sym_mod(s1.coeff(static_cast<int>(i)) - dpoly.coeff(static_cast<int>(i)), m2);
        s1.trim();
        ZPoly ub = mul_z(in.u, b), gc = mul_z(g1, c);
        u1.c.resize(std::max({u1.c.size(), ub.c.size(), gc.c.size()}), Int(0));
        for (size_t i = 0; i < u1.c.size(); ++i)
            u1.c[i] = sym_mod(u1.coeff(static_cast<int>(i)) - ub.coeff(static_cast<int>(i)) - gc.coeff(static_cast<int>(i)), m2);
        u1.trim();
    }
    return {g1, h1, s1, u1};
}

// Lift the full modular factor list of monic f from mod p to mod >= target
// by recursive two-way splitting.
std::vector<ZPoly> hensel_lift_tree(const ZPoly& f, const std::vector<Poly>& modular,
                                    unsigned long p, const Int& target, Int& modulus_out) {
    const ConstantField Fp = modular.front().field();
    Int modulus(p);
    // how far to lift
    while (modulus < target) modulus = modulus * modulus;
    modulus_out = modulus;
    std::vector<ZPoly> out;
    std::function<void(const ZPoly&, const std::vector<Poly>&)> rec =
        [&](const ZPoly& fz, const std::vector<Poly>& facs) {
            if (facs.size() == 1) {
                out.push_back(mod_z(fz, modulus));
                return;
            }
            size_t half = facs.size() / 2;
            std::vector<Poly> left(facs.begin(), facs.begin() + half);
            std::vector<Poly> right(facs.begin() + half, facs.end());
            Poly g = Poly::one(Fp), h = Poly::one(Fp);
            for (const auto& q : left) g = g * q;
            for (const auto& q : right) h = h * q;
            // leading-coefficient fix: make g monic, push lc into h side
            ExtGcd bez = ext_gcd(g, h);
            if (bez.g.degree() != 0)
                throw std::runtime_error("hensel: factors not coprime");
            LiftPair lp;
            Int dummy;
            lp.g = to_zpoly(g, dummy);
            lp.h = to_zpoly(h, dummy);
            lp.s = to_zpoly(bez.s.mul_scalar(Fp.inv(bez.g.coeff(0))), dummy);
            lp.u = to_zpoly(bez.u.mul_scalar(Fp.inv(bez.g.coeff(0))), dummy);
            Int m(p);
            lp.g = mod_z(lp.g, m);
            lp.h = mod_z(lp.h, m);
            lp.s = mod_z(lp.s, m);
            lp.u = mod_z(lp.u, m);
            while (m < modulus) {
                lp = hensel_step(mod_z(fz, m * m), lp, m);
                m = m * m;
            }
            rec(lp.g, left);
            rec(lp.h, right);
        };
    rec(mod_z(f, modulus), modular);
    return out;
}

// Landau-Mignotte style bound on coefficients of any monic factor product.
Int factor_bound(const ZPoly& f) {
    Int maxc(0);
    for (const auto& a : f.c) {
        Int ab = abs(a);
        if (ab > maxc) maxc = ab;
    }
    Int b = (maxc + 1) * Int(f.degree() + 1);
    Int two(2);
    Int pw;
    mpz_pow_ui(pw.get_mpz_t(), two.get_mpz_t(), static_cast<unsigned long>(f.degree() + 2));
    return b * pw * abs(f.c.back());
}

// Zassenhaus for a monic squarefree F in Z[t], deg >= 2.
std::vector<ZPoly> zassenhaus_monic(const ZPoly& F) {
    std::vector<ZPoly> out;
    static const unsigned long primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41,
                                           43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
                                           101, 103, 107, 109, 113, 127, 131, 137, 139, 149};
    for (unsigned long p : primes) {
        ConstantField Fp = ConstantField::Fp(p);
        Poly fp = zpoly_to_poly(F, Fp);
        if (fp.degree() != F.degree()) continue;
        if (gcd(fp, fp.derivative()).degree() != 0) continue; // not squarefree mod p
        std::vector<Poly> modular = factor_squarefree_fp(fp);
        std::sort(modular.begin(), modular.end(), poly_less);
        if (modular.size() == 1) {
            out.push_back(F);
            return out;
        }
        Int target = factor_bound(F) * 2 + 1;
        Int modulus;
        std::vector<ZPoly> lifted = hensel_lift_tree(F, modular, p, target, modulus);
        std::vector<bool> used(lifted.size(), false);
        ZPoly rem = F;
        size_t remaining = lifted.size();
        const ConstantField Q = ConstantField::Q();
        for (size_t card = 1; card <= lifted.size() && remaining > 0; ++card) {
            std::vector<size_t> idx;
            for (size_t i = 0; i < lifted.size(); ++i)
                if (!used[i]) idx.push_back(i);
            if (card > idx.size()) break;
            std::vector<size_t> sel(card);
            for (size_t i = 0; i < card; ++i) sel[i] = i;
            bool advanced = true;
            while (advanced) {
                ZPoly cand;
                cand.c = {Int(1)};
                for (size_t s : sel) cand = mod_z(mul_z(cand, lifted[idx[s]]), modulus);
                Poly rq = zpoly_to_poly(rem, Q);
                Poly pq = zpoly_to_poly(cand, Q);
                auto [quot, rr] = rq.divmod(pq);
                if (rr.is_zero()) {
                    out.push_back(cand);
                    Int den;
                    rem = to_zpoly(quot, den);
                    for (size_t s : sel) {
                        used[idx[s]] = true;
                        --remaining;
                    }
                    idx.clear();
                    for (size_t i = 0; i < lifted.size(); ++i)
                        if (!used[i]) idx.push_back(i);
                    if (card > idx.size()) break;
                    for (size_t i = 0; i < card; ++i) sel[i] = i;
                    continue;
                }
                advanced = false;
                for (size_t i = card; i-- > 0;) {
                    if (sel[i] + 1 <= idx.size() - (card - i)) {
                        ++sel[i];
                        for (size_t j = i + 1; j < card; ++j) sel[j] = sel[j - 1] + 1;
                        advanced = true;
                        break;
                    }
                }
            }
        }
        if (rem.degree() > 0) out.push_back(rem);
        return out;
    }
    throw std::runtime_error("factorization over Q: no suitable prime found");
}

// Factor a primitive squarefree f in Z[t] (deg >= 1) into irreducibles over
// Q.  Non-monic input is routed through the monic associate
// F(x) = lc^{n-1} f(x/lc) and the factors are mapped back.
std::vector<ZPoly> factor_squarefree_z(const ZPoly& f) {
    std::vector<ZPoly> out;
    if (f.degree() == 1) {
        out.push_back(f);
        return out;
    }
    Int lc = f.c.back();
    ZPoly F = f;
    if (lc != 1) {
        // monic associate F(x) = lc^{n-1} f(x/lc), so F.c[i] = a_i lc^{n-1-i}
        int n = f.degree();
        F.c.assign(f.c.size(), Int(0));
        F.c[static_cast<size_t>(n)] = 1;
        Int pw(1);
        for (int i = n - 1; i >= 0; --i) {
            F.c[static_cast<size_t>(i)] = f.c[static_cast<size_t>(i)] * pw;
            pw *= lc;
        }
    }
    for (const auto& G : zassenhaus_monic(F)) {
        if (lc == 1) {
            out.push_back(G);
            continue;
        }
        ZPoly g;
        Int pw(1);
        g.c.resize(G.c.size());
        for (size_t i = 0; i < G.c.size(); ++i) {
            g.c[i] = G.c[i] * pw;
            pw *= lc;
        }
        g.trim();
        Int cont = content_z(g);
        if (cont != 0)
            for (auto& a : g.c) a /= cont;
        if (!g.c.empty() && g.c.back() < 0)
            for (auto& a : g.c) a = -a;
        out.push_back(g);
    }
    return out;
}

// Yun squarefree decomposition over Q (char 0), f monic.
void squarefree_q(const Poly& f, FacMap& out) {
    Poly a = f;
    Poly g = gcd(a, a.derivative());
    Poly b = a.exact_div(g);
    Poly c = a.derivative().exact_div(g);
    Poly d = c - b.derivative();
    int i = 1;
    while (!(b.degree() == 0)) {
        Poly w = gcd(b, d);
        if (w.degree() > 0) out[w.monic()] += i;
        b = b.exact_div(w);
        c = d.exact_div(w);
        d = c - b.derivative();
        ++i;
    }
}

} // namespace

Factorization factorize(const Poly& f) {
    if (f.is_zero()) throw std::invalid_argument("factorization of zero polynomial");
    Factorization out;
    out.unit = f.leading();
    if (f.degree() == 0) return out;
    Poly m = f.monic();
    FacMap acc = make_facmap();
    if (f.field().is_prime_field()) {
        FacMap sf = make_facmap();
        squarefree_fp(m, sf, 1);
        for (const auto& [part, mult] : sf) {
            for (const auto& irr : factor_squarefree_fp(part)) acc[irr] += mult;
        }
    } else {
        FacMap sf = make_facmap();
        squarefree_q(m, sf);
        for (const auto& [part, mult] : sf) {
            Int den;
            ZPoly z = to_zpoly(part, den);
            Int cont = content_z(z);
            if (cont != 0)
                for (auto& a : z.c) a /= cont;
            for (const auto& zf : factor_squarefree_z(z))
                acc[zpoly_to_poly(zf, f.field()).monic()] += mult;
        }
    }
    for (auto& [g, e] : acc) out.factors.emplace_back(g, e);
    return out;
}

bool is_irreducible(const Poly& f) {
    if (f.degree() <= 0) return false;
    if (f.degree() == 1) return true;
    auto fac = factorize(f);
    return fac.factors.size() == 1 && fac.factors[0].second == 1;
}

std::vector<Rat> field_roots(const Poly& f) {
    std::vector<Rat> roots;
    for (const auto& [g, e] : factorize(f).factors) {
        (void)e;
        if (g.degree() == 1)
            roots.push_back(f.field().neg(g.coeff(0))); // monic t + c
    }
    return roots;
}

Poly find_irreducible(const ConstantField& fp, int degree) {
    if (!fp.is_prime_field()) throw std::invalid_argument("find_irreducible needs a prime field");
    if (degree == 1) return Poly::variable(fp);
    // enumerate monic polynomials by coefficient counter
    std::vector<unsigned long> digits(static_cast<size_t>(degree), 0);
    for (;;) {
        std::vector<Rat> c;
        for (auto d : digits) c.emplace_back(d);
        c.emplace_back(1);
        Poly f(fp, c);
        if (is_irreducible(f)) return f;
        size_t i = 0;
        while (i < digits.size() && ++digits[i] == fp.p) digits[i++] = 0;
        if (i == digits.size())
            throw std::runtime_error("no irreducible polynomial found (impossible)");
    }
}

std::optional<Poly> poly_sqrt(const Poly& f) {
    if (f.is_zero()) return Poly::zero(f.field());
    if (f.degree() % 2 != 0) return std::nullopt;
    auto fac = factorize(f);
    Poly r = Poly::one(f.field());
    for (const auto& [g, e] : fac.factors) {
        if (e % 2 != 0) return std::nullopt;
        r = r * g.pow(static_cast<unsigned long>(e / 2));
    }
    // unit must be a square in k
    if (f.field().is_prime_field()) {
        unsigned long p = f.field().p;
        Rat u = fac.unit;
        bool found = false;
        for (unsigned long a = 0; a < p; ++a) {
            if (f.field().reduce(Rat(a) * Rat(a)) == u) {
                r = r.mul_scalar(Rat(a));
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    } else {
        Rat u = fac.unit;
        if (u < 0) return std::nullopt;
        Int ns, ds;
        if (mpz_perfect_square_p(Int(u.get_num()).get_mpz_t()) == 0) return std::nullopt;
        if (mpz_perfect_square_p(Int(u.get_den()).get_mpz_t()) == 0) return std::nullopt;
        mpz_sqrt(ns.get_mpz_t(), Int(u.get_num()).get_mpz_t());
        mpz_sqrt(ds.get_mpz_t(), Int(u.get_den()).get_mpz_t());
        r = r.mul_scalar(Rat(ns) / Rat(ds));
    }
    return r;
}

} // namespace ffdyn
