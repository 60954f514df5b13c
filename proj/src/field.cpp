#include "ffdyn/field.hpp"

namespace ffdyn {

void check_prime(unsigned long n) {
    if (n < 2)
        throw std::invalid_argument("field characteristic must be a prime, got " + std::to_string(n));
    Int z(static_cast<unsigned long>(n));
    if (mpz_probab_prime_p(z.get_mpz_t(), 40) == 0)
        throw std::invalid_argument("field characteristic must be a prime, got " + std::to_string(n));
}

ConstantField ConstantField::Fp(unsigned long prime) {
    check_prime(prime);
    return ConstantField{FieldKind::prime_field, prime};
}

Rat ConstantField::reduce(const Rat& x) const {
    if (kind == FieldKind::rationals) {
        Rat r = x;
        r.canonicalize();
        return r;
    }
    Int pz(p);
    Int num = x.get_num() % pz;
    if (num < 0) num += pz;
    Int den = x.get_den() % pz;
    if (den == 0)
        throw std::invalid_argument("coefficient not in field: denominator divisible by " + std::to_string(p));
    Int dinv;
    if (mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), pz.get_mpz_t()) == 0)
        throw std::invalid_argument("coefficient not in field mod " + std::to_string(p));
    Int r = (num * dinv) % pz;
    if (r < 0) r += pz;
    return Rat(r);
}

Rat ConstantField::inv(const Rat& a) const {
    Rat x = reduce(a);
    if (x == 0) throw std::invalid_argument("division by zero in constant field");
    if (kind == FieldKind::rationals) return Rat(1) / x;
    Int pz(p), v = x.get_num(), r;
    if (mpz_invert(r.get_mpz_t(), v.get_mpz_t(), pz.get_mpz_t()) == 0)
        throw std::invalid_argument("non-invertible element mod " + std::to_string(p));
    return Rat(r);
}

std::string ConstantField::to_string() const {
    if (kind == FieldKind::rationals) return "Q";
    return "F" + std::to_string(p);
}

std::string rat_to_string(const Rat& x) {
    return x.get_str();
}

} // namespace ffdyn
