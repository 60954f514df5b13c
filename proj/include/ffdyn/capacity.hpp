#ifndef FFDYN_CAPACITY_HPP
#define FFDYN_CAPACITY_HPP

#include "ffdyn/homog.hpp"

#include <optional>

namespace ffdyn {

struct PointSet {
    std::vector<std::vector<RatFunc>> points;
    Place place;
};

// log|Delta(S)|_v = sum over all (N+1)-subsets of log|det|.  Throws
// std::domain_error("degenerate subset") when some det vanishes.
Rat delta_log(const std::vector<std::vector<RatFunc>>& s, const Place& v);

struct DiameterReport {
    int M;
    Rat log_dM;                       // (1/J_M) log|Delta| of the attaining subset
    std::vector<int> attaining;       // indices into the point set
    long J_M;
    long degenerate_skipped = 0;
};

// Exhaustive sup over M-subsets; degenerate subsets are skipped (they
// cannot attain a sup that any nondegenerate subset beats).
DiameterReport m_diameter(const PointSet& e, int M, long budget = 4000000);

// log_d{M+1} <= log_dM across the range
bool monotonicity_check(const PointSet& e, int m_lo, int m_hi, std::vector<DiameterReport>* reports = nullptr);

// A sequence of residue vectors every N+1 of which are independent: points
// of the rational normal curve plus the last basis vector.  Throws when the
// field is too small (count > q + 1).
std::vector<std::vector<Poly>> general_position_sequence(const ConstantField& k, const Poly& modulus, int N,
                                                         int count);

// Unit-ball lifts of a general-position residue sequence.
std::vector<std::vector<RatFunc>> general_position_lifts(const Place& v, int N, int count);

struct Ellipsoid {
    LinearMap generator; // E = generator(B(0,1))
};

Rat ellipsoid_diameter(const Ellipsoid& e, const Place& v);       // log d_inf = log|det|
bool ellipsoid_contains_unit_ball(const Ellipsoid& e, const Place& v);
// contains-ball + log d_inf = 0 forces the generator into GL(O_v)
bool ellipsoid_rigidity_check(const Ellipsoid& e, const Place& v);

// log d_inf of the filled Julia set of phi at v, through a good-reduction
// witness; cross-checked against the fitted-exponent resultant route.
struct JuliaDiameter {
    Rat log_diameter;
    Rat via_resultant;
    bool routes_agree;
};
JuliaDiameter julia_diameter(const HomogMap& phi, const ConjWitness& witness, const Place& v);

} // namespace ffdyn

#endif
