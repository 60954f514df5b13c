#ifndef FFDYN_FIELD_HPP
#define FFDYN_FIELD_HPP

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace ffdyn {

using Int = mpz_class;
using Rat = mpq_class;

enum class FieldKind { rationals, prime_field };

// The constant field k: either Q or F_p for a prime p.  Elements are carried
// as mpq_class values; F_p elements are kept canonical in [0, p).
struct ConstantField {
    FieldKind kind = FieldKind::rationals;
    unsigned long p = 0;

    static ConstantField Q() { return ConstantField{FieldKind::rationals, 0}; }
    static ConstantField Fp(unsigned long prime);

    bool operator==(const ConstantField& o) const { return kind == o.kind && p == o.p; }
    bool operator!=(const ConstantField& o) const { return !(*this == o); }
    bool is_prime_field() const { return kind == FieldKind::prime_field; }

    // Canonicalize an arbitrary rational into this field.  For F_p this
    // reduces num/den mod p and throws if the denominator vanishes.
    Rat reduce(const Rat& x) const;
    Rat from_long(long n) const { return reduce(Rat(n)); }

    Rat add(const Rat& a, const Rat& b) const { return reduce(a + b); }
    Rat sub(const Rat& a, const Rat& b) const { return reduce(a - b); }
    Rat mul(const Rat& a, const Rat& b) const { return reduce(a * b); }
    Rat neg(const Rat& a) const { return reduce(-a); }
    Rat inv(const Rat& a) const;
    Rat div(const Rat& a, const Rat& b) const { return mul(a, inv(b)); }

    Rat zero() const { return Rat(0); }
    Rat one() const { return Rat(1); }

    std::string to_string() const;
};

// Throws std::invalid_argument unless n is a prime that fits the checks we
// can afford; used by ConstantField::Fp and the JSON loaders.
void check_prime(unsigned long n);

std::string rat_to_string(const Rat& x);

} // namespace ffdyn

#endif
