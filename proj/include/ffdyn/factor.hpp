#ifndef FFDYN_FACTOR_HPP
#define FFDYN_FACTOR_HPP

#include "ffdyn/poly.hpp"

#include <optional>
#include <vector>

namespace ffdyn {

// unit * prod factors[i].first ^ factors[i].second, factors monic
// irreducible, sorted by Poly::cmp.
struct Factorization {
    Rat unit;
    std::vector<std::pair<Poly, int>> factors;
};

Factorization factorize(const Poly& f);
bool is_irreducible(const Poly& f);

// Roots of f in the constant field (with multiplicity collapsed out).
std::vector<Rat> field_roots(const Poly& f);

// Smallest monic irreducible of the given degree over F_p, by coefficient
// enumeration; used to build F_{p^m}.
Poly find_irreducible(const ConstantField& fp, int degree);

// Exact square root of f in k[t], if one exists with square leading unit.
std::optional<Poly> poly_sqrt(const Poly& f);

} // namespace ffdyn

#endif
