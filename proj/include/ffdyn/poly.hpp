#ifndef FFDYN_POLY_HPP
#define FFDYN_POLY_HPP

#include "ffdyn/field.hpp"

#include <vector>
#include <utility>

namespace ffdyn {

// Univariate polynomial in t over the constant field, dense ascending
// coefficients with no trailing zeros.  The zero polynomial has an empty
// coefficient vector and degree -1.
class Poly {
public:
    Poly() : field_(ConstantField::Q()) {}
    explicit Poly(ConstantField f) : field_(f) {}
    Poly(ConstantField f, std::vector<Rat> coeffs);

    static Poly zero(ConstantField f) { return Poly(f); }
    static Poly one(ConstantField f) { return constant(f, Rat(1)); }
    static Poly constant(ConstantField f, const Rat& c);
    static Poly variable(ConstantField f); // t

    const ConstantField& field() const { return field_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }

    // Coefficient of t^i (zero beyond the degree).
    Rat coeff(int i) const;
    const Rat& leading() const;
    const std::vector<Rat>& coeffs() const { return c_; }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator-() const;
    Poly operator*(const Poly& o) const;
    Poly mul_scalar(const Rat& s) const;
    Poly shift(int k) const; // multiply by t^k, k >= 0

    // Euclidean division; throws on zero divisor.
    std::pair<Poly, Poly> divmod(const Poly& d) const;
    Poly operator/(const Poly& d) const { return divmod(d).first; }
    Poly operator%(const Poly& d) const { return divmod(d).second; }
    // Division known to be exact; throws if a remainder appears.
    Poly exact_div(const Poly& d) const;

    Poly monic() const;
    Poly derivative() const;
    Poly pow(unsigned long e) const;
    Rat eval(const Rat& x) const;

    bool operator==(const Poly& o) const { return field_ == o.field_ && c_ == o.c_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    // Total order used for deterministic place ordering: by degree, then
    // coefficients from the top down.
    static int cmp(const Poly& a, const Poly& b);

    std::string to_string(const char* var = "t") const;

private:
    ConstantField field_;
    std::vector<Rat> c_;
    void trim();
};

Poly gcd(const Poly& a, const Poly& b); // monic gcd
Poly poly_powmod(const Poly& base, const Int& e, const Poly& mod);

// Extended Euclid: returns (g, s, u) monic g = s*a + u*b.
struct ExtGcd { Poly g, s, u; };
ExtGcd ext_gcd(const Poly& a, const Poly& b);

} // namespace ffdyn

#endif
