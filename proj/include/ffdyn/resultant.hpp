#ifndef FFDYN_RESULTANT_HPP
#define FFDYN_RESULTANT_HPP

#include "ffdyn/homog.hpp"

#include <optional>

namespace ffdyn {

struct ResultantValue {
    RatFunc value;
    bool degenerate = false; // a zero form was present
};

// Multivariate resultant of the N+1 degree-d forms, by the Macaulay
// numerator/denominator construction (the Sylvester matrix for N = 1),
// normalized so Res(x_0^d, ..., x_N^d) = 1.  For d = 1 this is det.
ResultantValue resultant(const HomogMap& phi);

// ord_v(Res) of the content-normalized model at v; throws on singular maps.
long res_ord(const HomogMap& phi, const Place& v);

// Verifies Res(c*Phi) = c^{(N+1) d^N} Res(Phi) for a non-constant c on
// deterministic random maps.  Supported grid: (1,1), (1,2), (1,3), (2,2).
bool scaling_exponent_check(int N, int d, unsigned long long seed = 1);

struct CompositionExponents {
    int N, d, dp;
    long a, b; // Res(Phi ∘ Phi') = ±Res(Phi)^a Res(Phi')^b
};

// Fits (a, b) from the place-valuation vectors of resultants of random
// composed pairs and verifies consistency across pairs.  Supported for
// N <= 2, d, d' >= 1, d*d' <= 9.
CompositionExponents fit_composition_exponents(int N, int d, int dp, unsigned long long seed = 1);

// Res(conj(Phi, Gamma)) = det(Gamma)^A * Res(Phi)^B, derived from the
// fitted composition exponents and cached per (N, d).
struct ConjugationExponents {
    long A, B;
};
ConjugationExponents conjugation_exponents(int N, int d);

// Exhaustive search for a nonzero common root of a constant-coefficient
// map over F_{p^m}; roots are returned as coordinate vectors of residue
// polynomials of degree < m.
std::optional<std::vector<Poly>> common_root_oracle(const HomogMap& phi, int m, long budget = 2000000);

// Exact determinant of a k[t] matrix (fraction-free Bareiss, with an
// evaluation/interpolation fast path over large prime fields).
Poly poly_matrix_det(const std::vector<std::vector<Poly>>& a, const ConstantField& F);

} // namespace ffdyn

#endif
