#ifndef FFDYN_HEIGHTS_HPP
#define FFDYN_HEIGHTS_HPP

#include "ffdyn/homog.hpp"

#include <optional>

namespace ffdyn {

// log ||x||_v = max_i log |x_i|_v over the nonzero coordinates.
Rat log_norm(const std::vector<RatFunc>& x, const Place& v);

struct HeightEstimate {
    Rat value;
    Rat error_bound; // |true - value| <= error_bound, exact rational
    long iterations_used = 0;
    bool exact = false;
};

struct HeightOptions {
    Rat target_error = Rat(1, 1048576); // 2^-20
    bool witness_search = true;         // bounded diagonal search before iterating
    long witness_bound = 2;
    std::optional<ConjWitness> witness; // known good-reduction witness at v
    bool force_iterate = false;         // exercise the orbit engine regardless
    long max_iterations = 64;
};

// Homogeneous local height of x at v with a certified bound.  Nonsingular
// reduction (directly or through a witness) gives the exact value; otherwise
// the orbit is iterated in the completed local field until the geometric
// error schedule meets the target.
HeightEstimate local_height(const HomogMap& phi, const std::vector<RatFunc>& x, const Place& v,
                            const HeightOptions& opts = {});

struct JuliaVerdict {
    enum class Status { escapes, bounded_certified, bounded_so_far };
    Status status;
    long at_iteration = 0;              // escapes: first iterate past the radius
    Rat log_norm_seen = 0;              // its log-norm
    std::optional<ConjWitness> witness; // bounded_certified
    long max_iter = 0;                  // bounded_so_far
};

// Membership of x in the homogeneous filled Julia set at v.  phi must be
// content-normalized at v.
JuliaVerdict julia_membership(const HomogMap& phi, const std::vector<RatFunc>& x, const Place& v,
                              long max_iter = 32, const std::optional<ConjWitness>& witness = std::nullopt);

struct HeightIdentityCheck {
    HeightEstimate lhs, rhs;
    Rat allowance; // sum of the two error bounds
    bool holds;
    bool exact_pair;
};

struct HeightIdentityReport {
    HeightIdentityCheck point_scaling; // H(c x) = H(x) + log|c|
    HeightIdentityCheck map_scaling;   // H_{c phi} = H_phi + log|c|/(d-1)
    HeightIdentityCheck conjugation;   // H_{g^{-1} phi g}(x) = H_phi(g x)
    bool all_hold;
};

HeightIdentityReport verify_height_identities(const HomogMap& phi, const LinearMap& gamma, const RatFunc& c,
                                              const std::vector<RatFunc>& x, const Place& v,
                                              const HeightOptions& opts = {});

} // namespace ffdyn

#endif
