#ifndef FFDYN_RATFUNC_HPP
#define FFDYN_RATFUNC_HPP

#include "ffdyn/poly.hpp"

namespace ffdyn {

// Element of K = k(t) as a reduced fraction with monic denominator.
class RatFunc {
public:
    RatFunc() : num_(ConstantField::Q()), den_(Poly::one(ConstantField::Q())) {}
    explicit RatFunc(const Poly& num) : num_(num), den_(Poly::one(num.field())) {}
    RatFunc(const Poly& num, const Poly& den); // reduces; throws on zero denominator

    static RatFunc zero(ConstantField f) { return RatFunc(Poly::zero(f)); }
    static RatFunc one(ConstantField f) { return RatFunc(Poly::one(f)); }
    static RatFunc constant(ConstantField f, const Rat& c) { return RatFunc(Poly::constant(f, c)); }
    static RatFunc variable(ConstantField f) { return RatFunc(Poly::variable(f)); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    const ConstantField& field() const { return num_.field(); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_one(); }
    // constant value; throws if not constant
    Rat constant_value() const;

    RatFunc operator+(const RatFunc& o) const;
    RatFunc operator-(const RatFunc& o) const;
    RatFunc operator-() const;
    RatFunc operator*(const RatFunc& o) const;
    RatFunc operator/(const RatFunc& o) const;
    RatFunc inverse() const;
    RatFunc pow(long e) const;

    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    Poly num_, den_;
    void reduce();
};

} // namespace ffdyn

#endif
