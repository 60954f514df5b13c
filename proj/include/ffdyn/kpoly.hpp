#ifndef FFDYN_KPOLY_HPP
#define FFDYN_KPOLY_HPP

#include "ffdyn/ratfunc.hpp"

#include <vector>

namespace ffdyn {

// Univariate polynomial in z with coefficients in K = k(t); used for
// dehomogenized dynamics on P^1 (fixed-point forms, preimages, multiplier
// algebras).
class KPoly {
public:
    KPoly() = default;
    explicit KPoly(ConstantField f) : field_(f) {}
    KPoly(ConstantField f, std::vector<RatFunc> coeffs);

    static KPoly zero(ConstantField f) { return KPoly(f); }
    static KPoly one(ConstantField f) { return constant(RatFunc::one(f)); }
    static KPoly constant(const RatFunc& c);
    static KPoly variable(ConstantField f);

    const ConstantField& field() const { return field_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    RatFunc coeff(int i) const;
    const RatFunc& leading() const;

    KPoly operator+(const KPoly& o) const;
    KPoly operator-(const KPoly& o) const;
    KPoly operator-() const;
    KPoly operator*(const KPoly& o) const;
    KPoly mul_scalar(const RatFunc& s) const;
    std::pair<KPoly, KPoly> divmod(const KPoly& d) const;
    KPoly operator/(const KPoly& d) const { return divmod(d).first; }
    KPoly operator%(const KPoly& d) const { return divmod(d).second; }
    KPoly monic() const;
    KPoly derivative() const;
    RatFunc eval(const RatFunc& x) const;

    bool operator==(const KPoly& o) const { return c_ == o.c_; }

    std::string to_string(const char* var = "z") const;

private:
    ConstantField field_ = ConstantField::Q();
    std::vector<RatFunc> c_;
    void trim();
};

KPoly kpoly_gcd(const KPoly& a, const KPoly& b);

struct KPolyExtGcd {
    KPoly g, s, u; // monic g = s*a + u*b
};
KPolyExtGcd kpoly_ext_gcd(const KPoly& a, const KPoly& b);

// All roots of f in K = k(t), with multiplicities, found by the rational
// root method over the UFD k[t] (divisor pairs of the extreme coefficients,
// with the unit constant solved for exactly).
std::vector<std::pair<RatFunc, int>> k_rational_roots(const KPoly& f);

} // namespace ffdyn

#endif
