#include "ffdyn/ratfunc.hpp"

namespace ffdyn {

RatFunc::RatFunc(const Poly& num, const Poly& den) : num_(num), den_(den) {
    if (den_.is_zero()) throw std::invalid_argument("division by zero polynomial");
    reduce();
}

void RatFunc::reduce() {
    if (num_.is_zero()) {
        den_ = Poly::one(num_.field());
        return;
    }
    Poly g = gcd(num_, den_);
    if (g.degree() > 0) {
        num_ = num_.exact_div(g);
        den_ = den_.exact_div(g);
    }
    Rat lc = den_.leading();
    if (lc != 1) {
        Rat inv = num_.field().inv(lc);
        num_ = num_.mul_scalar(inv);
        den_ = den_.mul_scalar(inv);
    }
}

Rat RatFunc::constant_value() const {
    if (!is_constant()) throw std::invalid_argument("not a constant: " + to_string());
    return num_.coeff(0);
}

RatFunc RatFunc::operator+(const RatFunc& o) const {
    return RatFunc(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RatFunc RatFunc::operator-(const RatFunc& o) const { return *this + (-o); }

RatFunc RatFunc::operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
}

RatFunc RatFunc::operator*(const RatFunc& o) const {
    return RatFunc(num_ * o.num_, den_ * o.den_);
}

RatFunc RatFunc::operator/(const RatFunc& o) const { return *this * o.inverse(); }

RatFunc RatFunc::inverse() const {
    if (is_zero()) throw std::invalid_argument("inverse of zero");
    return RatFunc(den_, num_);
}

RatFunc RatFunc::pow(long e) const {
    if (e == 0) return RatFunc::one(field());
    RatFunc b = e < 0 ? inverse() : *this;
    unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
    RatFunc r = RatFunc::one(field());
    while (k) {
        if (k & 1) r = r * b;
        b = b * b;
        k >>= 1;
    }
    return r;
}

std::string RatFunc::to_string() const {
    if (den_.is_one()) return num_.to_string();
    std::string n = num_.to_string();
    std::string d = den_.to_string();
    bool npar = num_.degree() > 0 && (n.find(' ') != std::string::npos);
    bool dpar = den_.degree() > 0;
    std::string out = npar ? "(" + n + ")" : n;
    out += "/";
    out += dpar ? "(" + d + ")" : d;
    return out;
}

} // namespace ffdyn
