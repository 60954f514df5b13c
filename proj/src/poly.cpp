#include "ffdyn/poly.hpp"

#include <sstream>

namespace ffdyn {

Poly::Poly(ConstantField f, std::vector<Rat> coeffs) : field_(f), c_(std::move(coeffs)) {
    for (auto& x : c_) x = field_.reduce(x);
    trim();
}

void Poly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::constant(ConstantField f, const Rat& c) {
    Poly r(f);
    Rat v = f.reduce(c);
    if (v != 0) r.c_.push_back(v);
    return r;
}

Poly Poly::variable(ConstantField f) {
    Poly r(f);
    r.c_ = {f.zero(), f.one()};
    return r;
}

Rat Poly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return Rat(0);
    return c_[i];
}

const Rat& Poly::leading() const {
    if (c_.empty()) throw std::invalid_argument("leading coefficient of zero polynomial");
    return c_.back();
}

Poly Poly::operator+(const Poly& o) const {
    Poly r(field_);
    r.c_.resize(std::max(c_.size(), o.c_.size()), field_.zero());
    for (size_t i = 0; i < r.c_.size(); ++i)
        r.c_[i] = field_.add(coeff(static_cast<int>(i)), o.coeff(static_cast<int>(i)));
    r.trim();
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& x : r.c_) x = field_.neg(x);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r(field_);
    if (is_zero() || o.is_zero()) return r;
    r.c_.assign(c_.size() + o.c_.size() - 1, field_.zero());
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j)
            r.c_[i + j] = field_.add(r.c_[i + j], field_.mul(c_[i], o.c_[j]));
    }
    r.trim();
    return r;
}

Poly Poly::mul_scalar(const Rat& s) const {
    Poly r = *this;
    Rat v = field_.reduce(s);
    for (auto& x : r.c_) x = field_.mul(x, v);
    r.trim();
    return r;
}

Poly Poly::shift(int k) const {
    if (is_zero() || k == 0) return *this;
    Poly r(field_);
    r.c_.assign(c_.size() + k, field_.zero());
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i + k] = c_[i];
    return r;
}

std::pair<Poly, Poly> Poly::divmod(const Poly& d) const {
    if (d.is_zero()) throw std::invalid_argument("division by zero polynomial");
    Poly q(field_), r = *this;
    if (degree() < d.degree()) return {q, r};
    q.c_.assign(degree() - d.degree() + 1, field_.zero());
    Rat lcinv = field_.inv(d.leading());
    while (!r.is_zero() && r.degree() >= d.degree()) {
        int k = r.degree() - d.degree();
        Rat f = field_.mul(r.leading(), lcinv);
        q.c_[k] = f;
        for (int i = 0; i <= d.degree(); ++i)
            r.c_[i + k] = field_.sub(r.c_[i + k], field_.mul(f, d.c_[i]));
        r.trim();
    }
    q.trim();
    return {q, r};
}

Poly Poly::exact_div(const Poly& d) const {
    auto [q, r] = divmod(d);
    if (!r.is_zero()) throw std::runtime_error("inexact polynomial division");
    return q;
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    return mul_scalar(field_.inv(leading()));
}

Poly Poly::derivative() const {
    Poly r(field_);
    if (c_.size() <= 1) return r;
    r.c_.resize(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i)
        r.c_[i - 1] = field_.mul(c_[i], field_.from_long(static_cast<long>(i)));
    r.trim();
    return r;
}

Poly Poly::pow(unsigned long e) const {
    Poly r = Poly::one(field_), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

Rat Poly::eval(const Rat& x) const {
    Rat r = field_.zero();
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        r = field_.add(field_.mul(r, x), *it);
    return r;
}

int Poly::cmp(const Poly& a, const Poly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
    for (int i = a.degree(); i >= 0; --i) {
        int c = ::cmp(a.c_[i], b.c_[i]);
        if (c != 0) return c < 0 ? -1 : 1;
    }
    return 0;
}

std::string Poly::to_string(const char* var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const Rat& a = c_[i];
        if (a == 0) continue;
        Rat abs = a < 0 ? Rat(-a) : a;
        if (first) {
            if (a < 0) os << "-";
            first = false;
        } else {
            os << (a < 0 ? " - " : " + ");
        }
        bool unit = (abs == 1);
        if (i == 0) {
            os << abs.get_str();
        } else {
            if (!unit) os << abs.get_str() << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

namespace {

// primitive integer vector of the coefficients (clears denominators and
// content); sign normalized to a positive leading coefficient
std::vector<Int> primitive_z(const Poly& f) {
    Int den(1);
    for (int i = 0; i <= f.degree(); ++i) {
        Int d = f.coeff(i).get_den(), g;
        mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
        den = den / g * d;
    }
    std::vector<Int> c;
    Int cont(0);
    for (int i = 0; i <= f.degree(); ++i) {
        Rat v = f.coeff(i) * Rat(den);
        c.push_back(v.get_num());
        mpz_gcd(cont.get_mpz_t(), cont.get_mpz_t(), c.back().get_mpz_t());
    }
    if (cont != 0)
        for (auto& x : c) x /= cont;
    if (!c.empty() && c.back() < 0)
        for (auto& x : c) x = -x;
    return c;
}

// primitive-PRS gcd over Z[t]: pseudo-remainders with the content stripped
// at every step, which keeps the coefficients from swelling
std::vector<Int> gcd_primitive_prs(std::vector<Int> a, std::vector<Int> b) {
    auto trim = [](std::vector<Int>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    auto content = [](const std::vector<Int>& v) {
        Int g(0);
        for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        return g;
    };
    trim(a);
    trim(b);
    while (!b.empty()) {
        // pseudo-remainder of a by b
        long da = static_cast<long>(a.size()) - 1, db = static_cast<long>(b.size()) - 1;
        if (da < db) {
            std::swap(a, b);
            continue;
        }
        Int lc = b.back();
        std::vector<Int> r = a;
        for (long k = da; k >= db; --k) {
            Int top = r[static_cast<size_t>(k)];
            if (top == 0) continue;
            for (long i = 0; i < static_cast<long>(r.size()); ++i)
                if (i != k) r[static_cast<size_t>(i)] *= lc;
            r[static_cast<size_t>(k)] = 0; // lc*top - top*lc
            for (long i = 0; i < db; ++i)
                r[static_cast<size_t>(k - db + i)] -= top * b[static_cast<size_t>(i)];
        }
        trim(r);
        Int cont = content(r);
        if (cont != 0)
            for (auto& x : r) x /= cont;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty() && a.back() < 0)
        for (auto& x : a) x = -x;
    return a;
}

} // namespace

Poly gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b.is_zero() ? b : b.monic();
    if (b.is_zero()) return a.monic();
    if (a.field().kind == FieldKind::rationals) {
        std::vector<Int> g = gcd_primitive_prs(primitive_z(a), primitive_z(b));
        std::vector<Rat> c;
        for (const auto& x : g) c.emplace_back(x);
        return Poly(a.field(), c).monic();
    }
    Poly x = a, y = b;
    while (!y.is_zero()) {
        Poly r = x % y;
        x = y;
        y = r;
    }
    if (x.is_zero()) return x;
    return x.monic();
}

Poly poly_powmod(const Poly& base, const Int& e, const Poly& mod) {
    Poly r = Poly::one(base.field()) % mod, b = base % mod;
    Int k = e;
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) r = (r * b) % mod;
        b = (b * b) % mod;
        k >>= 1;
    }
    return r;
}

ExtGcd ext_gcd(const Poly& a, const Poly& b) {
    ConstantField f = a.field();
    Poly r0 = a, r1 = b;
    Poly s0 = Poly::one(f), s1 = Poly::zero(f);
    Poly u0 = Poly::zero(f), u1 = Poly::one(f);
    while (!r1.is_zero()) {
        auto [q, r] = r0.divmod(r1);
        Poly s = s0 - q * s1, u = u0 - q * u1;
        r0 = r1; r1 = r;
        s0 = s1; s1 = s;
        u0 = u1; u1 = u;
    }
    if (r0.is_zero()) return {r0, s0, u0};
    Rat lcinv = f.inv(r0.leading());
    return {r0.mul_scalar(lcinv), s0.mul_scalar(lcinv), u0.mul_scalar(lcinv)};
}

} // namespace ffdyn
