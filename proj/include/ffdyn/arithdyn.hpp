#ifndef FFDYN_ARITHDYN_HPP
#define FFDYN_ARITHDYN_HPP

#include "ffdyn/resultant.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ffdyn {

// ---------------------------------------------------------------------
// Reduction reports
// ---------------------------------------------------------------------
struct ReductionEntry {
    Place place;
    long res_ord_normalized;
    bool good; // res_ord_normalized == 0
};

struct ReductionReport {
    std::vector<ReductionEntry> entries; // every place scanned
    std::vector<Place> bad;
};

bool good_reduction_given_coords(const HomogMap& phi, const Place& v, ReductionEntry* entry = nullptr);

// Scans support(Res) together with the coefficient supports and infinity;
// all other places have good reduction by the unit-resultant argument.
ReductionReport reduction_report(const HomogMap& phi);

// ---------------------------------------------------------------------
// Potential good reduction: bounded diagonal search
// ---------------------------------------------------------------------
struct PGRWitness {
    ConjWitness witness; // permutation ∘ diagonal place-powers
    Rat content;         // min coefficient ord of conj(phi, witness) at v
};

// Searches diag(pi^{q_0}, ..., pi^{q_N}) with q_i in (1/(d-1))Z cap
// [-bound, bound] (q_0 = 0), composed with coordinate permutations, for a
// conjugate whose normalized resultant valuation at v vanishes.  Pure
// valuation arithmetic; None means not found within the bound.
std::optional<PGRWitness> potential_good_reduction_search(const HomogMap& phi, const Place& v, long bound);

// Normalized resultant valuation of conj(phi, w) at v (rational once
// radical exponents enter); zero means the witness certifies good
// reduction over an extension.
Rat witness_normalized_res_ord(const HomogMap& phi, const ConjWitness& w, const Place& v, Rat* content = nullptr);

// ---------------------------------------------------------------------
// Isotriviality
// ---------------------------------------------------------------------
struct CharPolyInvariants {
    RatFunc det;
    std::vector<RatFunc> e;          // e_1 .. e_{N+1}
    std::vector<RatFunc> normalized; // e_i^{N+1} / det^i
};

CharPolyInvariants char_poly_invariants(const LinearMap& m);

struct ConstantModel {
    std::vector<FormalForm> forms; // all coefficients constant formal scalars
    std::string rendered;
};

struct IsotrivialityVerdict {
    enum class Status { isotrivial, non_isotrivial, unknown };
    Status status;
    // isotrivial: the conjugation (and model rescale) that lands in constants
    std::optional<ConjWitness> witness;
    std::optional<FormalScalar> model_scale;
    std::optional<ConstantModel> constant_model;
    // non-isotrivial: a multiplier symmetric function with nonempty support,
    // or a non-constant char-poly invariant for degree one
    std::optional<RatFunc> certificate;
    std::string certificate_kind;
    ReductionReport report;
    std::string note;
};

IsotrivialityVerdict linear_isotriviality(const LinearMap& m);

struct IsoOptions {
    long witness_bound = 3;
    int max_preper_effort = 4; // bound on n+m in the preperiodic search
};

IsotrivialityVerdict isotriviality(const HomogMap& phi, const IsoOptions& opts = {});

struct IterateCheck {
    IsotrivialityVerdict base, iterate;
    bool verdicts_agree;       // whenever both decisive
    bool reduction_transfers;  // good reduction of phi^r at v implies it for phi
    std::vector<Place> transfer_places;
};

IterateCheck iterate_isotriviality(const HomogMap& phi, int r, const IsoOptions& opts = {});

// ---------------------------------------------------------------------
// Preperiodic points and stabilizers
// ---------------------------------------------------------------------
struct PreperPoint {
    std::vector<RatFunc> point;
    int multiplicity;
};
struct PreperUnresolved {
    KPoly factor; // roots live in an extension of K
    int degree;
    int multiplicity;
    bool irreducible_known;
};
struct PreperSet {
    int n = 1, m = 0;
    std::vector<PreperPoint> points;
    std::vector<PreperUnresolved> unresolved;
};

// N = 1 over K: root-finding on the (n, m) fixed-point form.  Every listed
// point is re-verified by direct iteration.
PreperSet preperiodic_points(const HomogMap& phi, int n, int m);

// Exhaustive scan of P^N(F_q) for maps with constant coefficients over a
// prime field (q = p^deg via an irreducible modulus when deg > 1).
std::vector<std::vector<Poly>> preperiodic_points_fq(const HomogMap& phi, int n, int m, int ext_degree = 1,
                                                     long budget = 2000000);

// Elementary symmetric functions of the multipliers of Per_n (N = 1),
// computed from the characteristic polynomial of multiplication in
// K[z]/(fixed-point polynomial); no root extraction.
std::vector<RatFunc> multiplier_sigma(const HomogMap& phi, int n);

// Full enumeration of PGL_{N+1}(F_q) elements commuting with phi
// (constant coefficients over a prime field).  Budget-guarded.
std::vector<LinearMap> stabilizer(const HomogMap& phi, long budget = 2000000);

} // namespace ffdyn

#endif
