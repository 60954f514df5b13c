#ifndef FFDYN_HOMOG_HPP
#define FFDYN_HOMOG_HPP

#include "ffdyn/kpoly.hpp"
#include "ffdyn/places.hpp"

#include <map>
#include <optional>
#include <vector>

namespace ffdyn {

using Monomial = std::vector<int>;
using Form = std::map<Monomial, RatFunc>; // sparse homogeneous polynomial

// Invertible change of coordinates on P^N, an (N+1)x(N+1) matrix over K.
class LinearMap {
public:
    LinearMap() = default;
    LinearMap(ConstantField f, int n); // zero matrix
    static LinearMap identity(ConstantField f, int n);
    static LinearMap diagonal(const std::vector<RatFunc>& entries);
    static LinearMap permutation(ConstantField f, const std::vector<int>& perm);
    static LinearMap from_rows(const std::vector<std::vector<RatFunc>>& rows);
    static LinearMap from_columns(const std::vector<std::vector<RatFunc>>& cols);

    int size() const { return static_cast<int>(m_.size()); }
    const ConstantField& field() const { return field_; }
    const RatFunc& at(int i, int j) const { return m_[i][j]; }
    RatFunc& at(int i, int j) { return m_[i][j]; }

    RatFunc det() const;
    LinearMap inverse() const; // throws on singular
    LinearMap operator*(const LinearMap& o) const;
    std::vector<RatFunc> apply(const std::vector<RatFunc>& x) const;
    bool is_identity() const;

    bool operator==(const LinearMap& o) const { return m_ == o.m_; }
    std::string to_string() const;

private:
    ConstantField field_ = ConstantField::Q();
    std::vector<std::vector<RatFunc>> m_;
};

// N+1 homogeneous forms of common degree d in N+1 variables over K.
class HomogMap {
public:
    HomogMap(ConstantField f, int n_vars, int degree);
    // (x_0^d, ..., x_N^d)
    static HomogMap diagonal_power(ConstantField f, int n_vars, int degree);
    static HomogMap from_linear(const LinearMap& m);
    // P^1 map z -> p(z)/q(z) as the model (P(x0,x1), Q(x0,x1)) with z = x0/x1
    static HomogMap from_rational_function(const KPoly& p, const KPoly& q);

    const ConstantField& field() const { return field_; }
    int n_vars() const { return nvars_; }       // N+1
    int dim() const { return nvars_ - 1; }      // N
    int degree() const { return degree_; }
    const std::vector<Form>& forms() const { return forms_; }
    const Form& form(int i) const { return forms_[i]; }

    void set_coeff(int form, const Monomial& mono, const RatFunc& c); // validates degree
    RatFunc coeff(int form, const Monomial& mono) const;
    bool is_degenerate() const; // some form identically zero

    std::vector<RatFunc> evaluate(const std::vector<RatFunc>& x) const;
    HomogMap compose(const HomogMap& inner) const; // this ∘ inner
    HomogMap iterate(int ell) const;               // ell >= 1
    HomogMap scale(const RatFunc& c) const;        // c != 0
    // peel the uniformizer content at v: returns (Phi', m) with
    // Phi' = pi_v^{-m} Phi and min coefficient ord 0
    std::pair<HomogMap, long> normalize_at(const Place& v) const;
    Rat sup_norm_coeff(const Place& v) const;           // log H over all forms
    Rat sup_norm_coeff(int form, const Place& v) const; // single form
    long min_coeff_ord(const Place& v) const;

    // dehomogenization for N = 1: form_i(z, 1)
    KPoly dehomogenize(int form) const;

    bool operator==(const HomogMap& o) const;
    std::string to_string() const;

private:
    ConstantField field_;
    int nvars_, degree_;
    std::vector<Form> forms_;
};

// The uniformizer of a place as an element of K: the prime polynomial, or
// 1/t at infinity.
RatFunc uniformizer(const Place& v);

HomogMap conjugate(const HomogMap& phi, const LinearMap& gamma); // gamma^{-1} ∘ phi ∘ gamma

// ---------------------------------------------------------------------
// Formal monomial scalars: base * prod_v pi_v^{q_v} * prod_j u_j^{e_j}
// with rational exponents q_v, constant units u_j.  These carry the
// value-group bookkeeping that replaces finite extensions of K.
// ---------------------------------------------------------------------
struct FormalScalar {
    RatFunc base;
    std::map<Place, Rat> rad;                 // fractional place exponents
    std::vector<std::pair<Rat, Rat>> croots;  // (constant unit, exponent)

    static FormalScalar from(const RatFunc& b);
    static FormalScalar one(ConstantField f) { return from(RatFunc::one(f)); }
    // c^{num/den} for nonzero c in K, via the factorization of c
    static FormalScalar root(const RatFunc& c, const Rat& exponent);

    bool is_zero() const { return base.is_zero(); }
    FormalScalar mul(const FormalScalar& o) const;
    FormalScalar inv() const;
    FormalScalar pow_int(long e) const;
    Rat ord_at(const Place& v) const;
    // all exponents integral (so the scalar lies in K up to constant roots)?
    bool is_in_K() const;
    RatFunc to_ratfunc() const; // throws "unresolved fractional exponent"
    // unit at every place (i.e. a constant, possibly in an extension of k)
    bool is_constant() const;
    void canonicalize();
    std::string to_string() const;
};

// Diagonal conjugation by diag(s_0, ..., s_N) with FormalScalar entries.
struct DiagConj {
    std::vector<FormalScalar> entries;

    static DiagConj identity(ConstantField f, int n);
    static DiagConj place_powers(const Place& v, const std::vector<Rat>& exps);
    bool is_identity() const;
    DiagConj inverse() const;
    Rat det_ord_at(const Place& v) const;
    std::string to_string() const;
};

using FormalForm = std::map<Monomial, FormalScalar>;

// gamma^{-1} ∘ phi ∘ gamma for a formal diagonal gamma; the formal variant
// keeps fractional exponents, the strict one requires them to cancel.
std::vector<FormalForm> conjugate_formal(const HomogMap& phi, const DiagConj& gamma);
HomogMap conjugate(const HomogMap& phi, const DiagConj& gamma); // throws if unresolved

// A full conjugation witness: gamma = linear ∘ diag (apply diag first).
struct ConjWitness {
    LinearMap linear;
    DiagConj diag;

    static ConjWitness identity(ConstantField f, int n);
    bool is_identity() const;
    Rat det_ord_at(const Place& v) const;
    // ords of gamma^{-1} x for x in K^{N+1}; infinity encoded as nullopt
    std::vector<std::optional<Rat>> inverse_image_ords(const std::vector<RatFunc>& x, const Place& v) const;
    std::string to_string() const;
};

HomogMap conjugate(const HomogMap& phi, const ConjWitness& w);
std::vector<FormalForm> conjugate_formal(const HomogMap& phi, const ConjWitness& w);

// ---------------------------------------------------------------------
// Preimages on P^1 (desk-scale witness that deg(phi) = d)
// ---------------------------------------------------------------------
struct PreimagePoint {
    std::vector<RatFunc> point; // K-rational lift
    int multiplicity;
};
struct PreimageFactor {
    KPoly factor; // splits only over an extension of K
    int degree;
    int multiplicity;
    bool irreducible_known;
};
struct PreimageSet {
    std::vector<PreimagePoint> rational;
    std::vector<PreimageFactor> symbolic;
    int total_multiplicity() const;
};

// Solutions of phi(x) = Q in P^1, counted with multiplicity (total = d).
// Requires phi nonsingular.
PreimageSet preimages(const HomogMap& phi, const std::vector<RatFunc>& q);

} // namespace ffdyn

#endif
