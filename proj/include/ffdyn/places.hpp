#ifndef FFDYN_PLACES_HPP
#define FFDYN_PLACES_HPP

#include "ffdyn/ratfunc.hpp"

#include <vector>

namespace ffdyn {

// A place of K = k(t): a monic irreducible polynomial, or the place at
// infinity.  log|a|_v = -degree(v) * ord_v(a), in exact rational log units,
// normalized so the product formula holds over non-closed constant fields.
class Place {
public:
    static Place infinity(ConstantField f);
    static Place finite(const Poly& prime); // validates monic irreducible

    bool is_infinite() const { return infinite_; }
    const Poly& prime() const;
    const ConstantField& field() const { return field_; }
    int degree() const { return degree_; }

    bool operator==(const Place& o) const;
    bool operator!=(const Place& o) const { return !(*this == o); }
    // finite places by (degree, coefficient order), infinity last
    bool operator<(const Place& o) const;

    std::string to_string() const; // "inf" or the monic polynomial

private:
    Place() : field_(ConstantField::Q()), prime_(ConstantField::Q()) {}
    bool infinite_ = false;
    ConstantField field_;
    Poly prime_;
    int degree_ = 1;
};

long ord(const RatFunc& a, const Place& v); // throws "valuation of zero"
long ord(const Poly& a, const Place& v);
Rat log_abs(const RatFunc& a, const Place& v);

std::vector<std::pair<Place, long>> support(const RatFunc& a);
// Sum of degree(v)*ord_v(a) over the support (including infinity); the
// product formula says this is 0 for every nonzero a.
Rat product_formula_sum(const RatFunc& a);

// Image of a in the residue field of v, represented as a polynomial of
// degree < deg(v) (a constant for the infinite place).  Throws on a pole.
Poly residue(const RatFunc& a, const Place& v);

} // namespace ffdyn

#endif
