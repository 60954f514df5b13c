#include "ffdyn/kpoly.hpp"
#include "ffdyn/factor.hpp"

#include <sstream>

namespace ffdyn {

KPoly::KPoly(ConstantField f, std::vector<RatFunc> coeffs) : field_(f), c_(std::move(coeffs)) {
    trim();
}

void KPoly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

KPoly KPoly::constant(const RatFunc& c) {
    KPoly r(c.field());
    if (!c.is_zero()) r.c_.push_back(c);
    return r;
}

KPoly KPoly::variable(ConstantField f) {
    KPoly r(f);
    r.c_ = {RatFunc::zero(f), RatFunc::one(f)};
    return r;
}

RatFunc KPoly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return RatFunc::zero(field_);
    return c_[i];
}

const RatFunc& KPoly::leading() const {
    if (c_.empty()) throw std::invalid_argument("leading coefficient of zero polynomial");
    return c_.back();
}

KPoly KPoly::operator+(const KPoly& o) const {
    KPoly r(field_);
    r.c_.resize(std::max(c_.size(), o.c_.size()), RatFunc::zero(field_));
    for (size_t i = 0; i < r.c_.size(); ++i)
        r.c_[i] = coeff(static_cast<int>(i)) + o.coeff(static_cast<int>(i));
    r.trim();
    return r;
}

KPoly KPoly::operator-(const KPoly& o) const { return *this + (-o); }

KPoly KPoly::operator-() const {
    KPoly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

KPoly KPoly::operator*(const KPoly& o) const {
    KPoly r(field_);
    if (is_zero() || o.is_zero()) return r;
    r.c_.assign(c_.size() + o.c_.size() - 1, RatFunc::zero(field_));
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        for (size_t j = 0; j < o.c_.size(); ++j)
            r.c_[i + j] = r.c_[i + j] + c_[i] * o.c_[j];
    }
    r.trim();
    return r;
}

KPoly KPoly::mul_scalar(const RatFunc& s) const {
    KPoly r = *this;
    for (auto& x : r.c_) x = x * s;
    r.trim();
    return r;
}

std::pair<KPoly, KPoly> KPoly::divmod(const KPoly& d) const {
    if (d.is_zero()) throw std::invalid_argument("division by zero polynomial");
    KPoly q(field_), r = *this;
    if (degree() < d.degree()) return {q, r};
    q.c_.assign(static_cast<size_t>(degree() - d.degree()) + 1, RatFunc::zero(field_));
    RatFunc lcinv = d.leading().inverse();
    while (!r.is_zero() && r.degree() >= d.degree()) {
        int k = r.degree() - d.degree();
        RatFunc f = r.leading() * lcinv;
        q.c_[static_cast<size_t>(k)] = f;
        for (int i = 0; i <= d.degree(); ++i)
            r.c_[static_cast<size_t>(i + k)] = r.c_[static_cast<size_t>(i + k)] - f * d.c_[static_cast<size_t>(i)];
        r.trim();
    }
    q.trim();
    return {q, r};
}

KPoly KPoly::monic() const {
    if (is_zero()) return *this;
    return mul_scalar(leading().inverse());
}

KPoly KPoly::derivative() const {
    KPoly r(field_);
    if (c_.size() <= 1) return r;
    r.c_.resize(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i)
        r.c_[i - 1] = c_[i] * RatFunc::constant(field_, field_.from_long(static_cast<long>(i)));
    r.trim();
    return r;
}

RatFunc KPoly::eval(const RatFunc& x) const {
    RatFunc r = RatFunc::zero(field_);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        r = r * x + *it;
    return r;
}

std::string KPoly::to_string(const char* var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const RatFunc& a = c_[static_cast<size_t>(i)];
        if (a.is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << a.to_string() << ")";
        if (i >= 1) {
            os << "*" << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

KPoly kpoly_gcd(const KPoly& a, const KPoly& b) {
    KPoly x = a, y = b;
    while (!y.is_zero()) {
        KPoly r = (x % y);
        x = y.monic();
        y = r;
    }
    return x.is_zero() ? x : x.monic();
}

KPolyExtGcd kpoly_ext_gcd(const KPoly& a, const KPoly& b) {
    ConstantField f = a.field();
    KPoly r0 = a, r1 = b;
    KPoly s0 = KPoly::one(f), s1 = KPoly::zero(f);
    KPoly u0 = KPoly::zero(f), u1 = KPoly::one(f);
    while (!r1.is_zero()) {
        auto [q, r] = r0.divmod(r1);
        KPoly s = s0 - q * s1, u = u0 - q * u1;
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        u0 = u1;
        u1 = u;
    }
    if (r0.is_zero()) return {r0, s0, u0};
    RatFunc lcinv = r0.leading().inverse();
    return {r0.mul_scalar(lcinv), s0.mul_scalar(lcinv), u0.mul_scalar(lcinv)};
}

namespace {

// monic divisors of a k[t] polynomial, from its factorization
std::vector<Poly> monic_divisors(const Poly& f, size_t cap = 4096) {
    std::vector<Poly> out = {Poly::one(f.field())};
    if (f.degree() < 1) return out;
    auto fac = factorize(f);
    for (const auto& [g, e] : fac.factors) {
        std::vector<Poly> next;
        for (const auto& d : out) {
            Poly pw = Poly::one(f.field());
            for (int i = 0; i <= e; ++i) {
                next.push_back(d * pw);
                if (i < e) pw = pw * g;
            }
        }
        out = std::move(next);
        if (out.size() > cap) throw std::runtime_error("budget exceeded: too many divisors");
    }
    return out;
}

} // namespace

std::vector<std::pair<RatFunc, int>> k_rational_roots(const KPoly& f) {
    if (f.is_zero()) throw std::invalid_argument("roots of zero polynomial");
    const ConstantField& F = f.field();
    std::vector<std::pair<RatFunc, int>> out;
    KPoly g = f;
    // z = 0 roots
    int m0 = 0;
    while (g.degree() >= 1 && g.coeff(0).is_zero()) {
        g = g / KPoly::variable(F);
        ++m0;
    }
    if (m0 > 0) out.emplace_back(RatFunc::zero(F), m0);
    if (g.degree() < 1) return out;

    // clear t-denominators: coefficients c_i in k[t]
    Poly lcm = Poly::one(F);
    for (int i = 0; i <= g.degree(); ++i) {
        if (g.coeff(i).is_zero()) continue;
        Poly d = g.coeff(i).den();
        lcm = lcm * d.exact_div(gcd(lcm, d));
    }
    std::vector<Poly> c(static_cast<size_t>(g.degree()) + 1, Poly::zero(F));
    for (int i = 0; i <= g.degree(); ++i) {
        RatFunc ci = g.coeff(i) * RatFunc(lcm);
        if (!ci.den().is_one()) throw std::runtime_error("internal: denominator not cleared");
        c[static_cast<size_t>(i)] = ci.num();
    }
    int n = g.degree();

    auto nums = monic_divisors(c[0]);
    auto dens = monic_divisors(c[static_cast<size_t>(n)]);
    for (const auto& A : nums) {
        for (const auto& B : dens) {
            if (gcd(A, B).degree() > 0) continue;
            // f(gamma*A/B) = 0  <=>  sum_i c_i gamma^i A^i B^{n-i} = 0;
            // collect the t-coefficients as polynomials in gamma over k
            std::vector<Poly> terms;
            int maxdeg = -1;
            for (int i = 0; i <= n; ++i) {
                Poly term = c[static_cast<size_t>(i)] * A.pow(static_cast<unsigned long>(i)) *
                            B.pow(static_cast<unsigned long>(n - i));
                terms.push_back(term);
                maxdeg = std::max(maxdeg, term.degree());
            }
            Poly gg = Poly::zero(F); // gcd over j of the gamma-polynomials
            for (int j = 0; j <= maxdeg; ++j) {
                std::vector<Rat> gc(static_cast<size_t>(n) + 1, F.zero());
                for (int i = 0; i <= n; ++i) gc[static_cast<size_t>(i)] = terms[static_cast<size_t>(i)].coeff(j);
                Poly gj(F, gc);
                gg = gg.is_zero() ? gj : gcd(gg, gj);
                if (gg.degree() == 0 && !gg.is_zero()) break;
            }
            if (gg.is_zero() || gg.degree() == 0) continue;
            for (const Rat& gamma : field_roots(gg)) {
                if (gamma == 0) continue;
                RatFunc root = RatFunc(A.mul_scalar(gamma), B);
                // verify and extract multiplicity
                if (!g.eval(root).is_zero()) continue;
                bool seen = false;
                for (const auto& [r, m] : out)
                    if (r == root) seen = true;
                if (seen) continue;
                int mult = 0;
                KPoly lin(F, {-root, RatFunc::one(F)});
                KPoly rem = g;
                for (;;) {
                    auto [q, rr] = rem.divmod(lin);
                    if (!rr.is_zero()) break;
                    ++mult;
                    rem = q;
                }
                out.emplace_back(root, mult);
            }
        }
    }
    return out;
}

} // namespace ffdyn
