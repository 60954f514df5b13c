#include "ffdyn/heights.hpp"
#include "ffdyn/arithdyn.hpp"
#include "ffdyn/resultant.hpp"

#include <algorithm>

namespace ffdyn {

Rat log_norm(const std::vector<RatFunc>& x, const Place& v) {
    bool seen = false;
    long m = 0;
    for (const auto& xi : x) {
        if (xi.is_zero()) continue;
        long o = ord(xi, v);
        if (!seen || o < m) m = o;
        seen = true;
    }
    if (!seen) throw std::invalid_argument("log_norm of the zero vector");
    return Rat(-v.degree()) * Rat(m);
}

namespace {

// ---------------------------------------------------------------------
// Laurent-series arithmetic in the completion at v.  Residue-field
// elements are polynomials modulo the place polynomial (modulo t at the
// infinite place, i.e. constants).
// ---------------------------------------------------------------------

struct LocalCtx {
    ConstantField k;
    Place v;
    Poly modulus;

    static LocalCtx at(const Place& v) {
        return LocalCtx{v.field(), v, v.is_infinite() ? Poly::variable(v.field()) : v.prime()};
    }
    Poly mul(const Poly& a, const Poly& b) const { return (a * b) % modulus; }
    Poly inv(const Poly& a) const {
        ExtGcd e = ext_gcd(a % modulus, modulus);
        if (e.g.degree() != 0) throw std::runtime_error("residue element not invertible");
        return e.s.mul_scalar(k.inv(e.g.coeff(0))) % modulus;
    }
};

struct LSeries {
    long lead = 0;
    std::vector<Poly> c; // exact for exponents in [lead, prec)
    long prec = 0;

    bool null_to_prec() const { return c.empty(); }
};

LSeries normalized(LSeries s) {
    size_t drop = 0;
    while (drop < s.c.size() && s.c[drop].is_zero()) ++drop;
    if (drop) {
        s.c.erase(s.c.begin(), s.c.begin() + static_cast<long>(drop));
        s.lead += static_cast<long>(drop);
    }
    if (s.lead + static_cast<long>(s.c.size()) > s.prec) {
        long keep = s.prec - s.lead;
        s.c.resize(keep > 0 ? static_cast<size_t>(keep) : 0);
    }
    while (!s.c.empty() && s.c.back().is_zero()) s.c.pop_back();
    if (s.c.empty()) s.lead = s.prec;
    return s;
}

LSeries poly_series(const Poly& f, const LocalCtx& ctx, long prec) {
    LSeries s;
    s.prec = prec;
    if (f.is_zero()) {
        s.lead = prec;
        return s;
    }
    if (ctx.v.is_infinite()) {
        int d = f.degree();
        s.lead = -d;
        for (int j = 0; j <= d && s.lead + j < prec; ++j)
            s.c.push_back(Poly::constant(ctx.k, f.coeff(d - j)));
    } else {
        s.lead = 0;
        Poly rem = f;
        while (!rem.is_zero() && s.lead + static_cast<long>(s.c.size()) < prec) {
            auto [q, r] = rem.divmod(ctx.modulus);
            s.c.push_back(r);
            rem = q;
        }
    }
    return normalized(s);
}

LSeries series_div(const LSeries& a, const LSeries& b, const LocalCtx& ctx, long prec) {
    if (b.null_to_prec()) throw std::runtime_error("series division by zero");
    LSeries q;
    q.prec = prec;
    if (a.null_to_prec()) {
        q.lead = prec;
        return q;
    }
    q.lead = a.lead - b.lead;
    long len = prec - q.lead;
    if (len <= 0) {
        q.lead = prec;
        return q;
    }
    Poly binv = ctx.inv(b.c[0]);
    std::vector<Poly> rem(static_cast<size_t>(len), Poly::zero(ctx.k));
    for (long i = 0; i < len && i < static_cast<long>(a.c.size()); ++i) rem[static_cast<size_t>(i)] = a.c[static_cast<size_t>(i)];
    q.c.assign(static_cast<size_t>(len), Poly::zero(ctx.k));
    for (long i = 0; i < len; ++i) {
        Poly qi = ctx.mul(rem[static_cast<size_t>(i)], binv);
        q.c[static_cast<size_t>(i)] = qi;
        if (qi.is_zero()) continue;
        for (long j = 0; j < static_cast<long>(b.c.size()) && i + j < len; ++j)
            rem[static_cast<size_t>(i + j)] = (rem[static_cast<size_t>(i + j)] - ctx.mul(qi, b.c[static_cast<size_t>(j)])) % ctx.modulus;
    }
    return normalized(q);
}

LSeries ratfunc_series(const RatFunc& a, const LocalCtx& ctx, long prec) {
    if (a.is_zero()) {
        LSeries s;
        s.prec = prec;
        s.lead = prec;
        return s;
    }
    long oden = ord(a.den(), ctx.v);
    LSeries num = poly_series(a.num(), ctx, prec + oden);
    LSeries den = poly_series(a.den(), ctx, prec + oden);
    return series_div(num, den, ctx, prec);
}

LSeries series_mul(const LSeries& a, const LSeries& b, const LocalCtx& ctx, long cap) {
    LSeries r;
    r.prec = std::min({a.prec + b.lead, b.prec + a.lead, cap});
    if (a.null_to_prec() || b.null_to_prec()) {
        r.lead = r.prec;
        return r;
    }
    r.lead = a.lead + b.lead;
    long len = r.prec - r.lead;
    if (len <= 0) {
        r.lead = r.prec;
        r.c.clear();
        return r;
    }
    r.c.assign(static_cast<size_t>(len), Poly::zero(ctx.k));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        for (size_t j = 0; j < b.c.size(); ++j) {
            long pos = static_cast<long>(i) + static_cast<long>(j);
            if (pos >= len) break;
            r.c[static_cast<size_t>(pos)] = (r.c[static_cast<size_t>(pos)] + ctx.mul(a.c[i], b.c[j])) % ctx.modulus;
        }
    }
    return normalized(r);
}

LSeries series_add(const LSeries& a, const LSeries& b, const LocalCtx& ctx) {
    LSeries r;
    r.prec = std::min(a.prec, b.prec);
    long lead = std::min(a.null_to_prec() ? r.prec : a.lead, b.null_to_prec() ? r.prec : b.lead);
    if (lead >= r.prec) {
        r.lead = r.prec;
        return r;
    }
    r.lead = lead;
    long len = r.prec - lead;
    r.c.assign(static_cast<size_t>(len), Poly::zero(ctx.k));
    for (size_t i = 0; i < a.c.size(); ++i) {
        long pos = a.lead + static_cast<long>(i) - lead;
        if (pos >= 0 && pos < len) r.c[static_cast<size_t>(pos)] = (r.c[static_cast<size_t>(pos)] + a.c[i]) % ctx.modulus;
    }
    for (size_t i = 0; i < b.c.size(); ++i) {
        long pos = b.lead + static_cast<long>(i) - lead;
        if (pos >= 0 && pos < len) r.c[static_cast<size_t>(pos)] = (r.c[static_cast<size_t>(pos)] + b.c[i]) % ctx.modulus;
    }
    return normalized(r);
}

LSeries series_pow(const LSeries& a, int e, const LocalCtx& ctx, long cap) {
    LSeries r;
    r.lead = 0;
    r.prec = cap;
    r.c = {Poly::one(ctx.k)};
    LSeries b = a;
    while (e) {
        if (e & 1) r = series_mul(r, b, ctx, cap);
        b = series_mul(b, b, ctx, cap);
        e >>= 1;
    }
    return r;
}

// The exact min-ord increments of the renormalized orbit.  phin must be
// content-normalized at v with res_ord R; each increment lies in [0, R].
struct OrbitTrace {
    long initial_ord;
    std::vector<long> increments;
};

OrbitTrace run_orbit(const HomogMap& phin, const std::vector<RatFunc>& x, const Place& v, long steps, long R) {
    LocalCtx ctx = LocalCtx::at(v);
    long W = R * steps + R + 8;
    std::vector<std::vector<std::pair<Monomial, LSeries>>> cs(static_cast<size_t>(phin.n_vars()));
    for (int i = 0; i < phin.n_vars(); ++i)
        for (const auto& [m, c] : phin.form(i)) cs[static_cast<size_t>(i)].emplace_back(m, ratfunc_series(c, ctx, W + 1));
    long a0 = 0;
    bool seen = false;
    for (const auto& xi : x) {
        if (xi.is_zero()) continue;
        long o = ord(xi, v);
        if (!seen || o < a0) a0 = o;
        seen = true;
    }
    if (!seen) throw std::invalid_argument("orbit of the zero vector");
    std::vector<LSeries> state;
    for (const auto& xi : x) {
        LSeries s = ratfunc_series(xi, ctx, a0 + W);
        s.lead -= a0;
        s.prec -= a0;
        state.push_back(s);
    }
    OrbitTrace out;
    out.initial_ord = a0;
    long Wcur = W;
    for (long step = 0; step < steps; ++step) {
        std::vector<LSeries> next;
        for (int i = 0; i < phin.n_vars(); ++i) {
            LSeries acc;
            acc.prec = Wcur;
            acc.lead = Wcur;
            for (const auto& [m, c] : cs[static_cast<size_t>(i)]) {
                LSeries term = c;
                if (term.prec > Wcur) term.prec = Wcur;
                term = normalized(term);
                for (int j = 0; j < phin.n_vars(); ++j)
                    if (m[static_cast<size_t>(j)] != 0)
                        term = series_mul(term, series_pow(state[static_cast<size_t>(j)], m[static_cast<size_t>(j)], ctx, Wcur), ctx, Wcur);
                acc = series_add(acc, term, ctx);
            }
            next.push_back(acc);
        }
        long r = Wcur;
        for (const auto& s : next)
            if (!s.null_to_prec()) r = std::min(r, s.lead);
        if (r > R)
            throw std::runtime_error("orbit window exhausted (increment exceeded the resultant bound)");
        for (auto& s : next) {
            s.lead -= r;
            s.prec -= r;
        }
        Wcur -= r;
        state = std::move(next);
        out.increments.push_back(r);
    }
    return out;
}

Rat witness_height_value(const HomogMap& phin, const std::vector<RatFunc>& x, const Place& v,
                         const ConjWitness& w, const Rat& content) {
    // H_{phin}(x) = log||w^{-1} x|| + content * (-deg v)/(d-1)
    auto ords = w.inverse_image_ords(x, v);
    std::optional<Rat> minord;
    for (const auto& o : ords) {
        if (!o) continue;
        if (!minord || *o < *minord) minord = *o;
    }
    if (!minord) throw std::invalid_argument("zero vector after coordinate change");
    Rat d(phin.degree());
    return Rat(-v.degree()) * (*minord) + content * Rat(-v.degree()) / (d - 1);
}

} // namespace

HeightEstimate local_height(const HomogMap& phi, const std::vector<RatFunc>& x, const Place& v,
                            const HeightOptions& opts) {
    int d = phi.degree();
    if (d < 2) throw std::invalid_argument("local heights need degree >= 2");
    bool nonzero = false;
    for (const auto& xi : x)
        if (!xi.is_zero()) nonzero = true;
    if (!nonzero) throw std::invalid_argument("zero vector");
    auto [phin, m] = phi.normalize_at(v);
    RatFunc res = resultant(phin).value;
    if (res.is_zero()) throw std::invalid_argument("singular map");
    long R = ord(res, v);
    Rat offset = Rat(m) * Rat(-v.degree()) / Rat(d - 1);
    HeightEstimate out;
    if (R == 0 && !opts.force_iterate) {
        out.value = log_norm(x, v) + offset;
        out.error_bound = 0;
        out.exact = true;
        return out;
    }
    if (!opts.force_iterate) {
        std::optional<PGRWitness> wit;
        if (opts.witness) {
            Rat content;
            Rat r = witness_normalized_res_ord(phin, *opts.witness, v, &content);
            if (r == 0) wit = PGRWitness{*opts.witness, content};
        }
        if (!wit && opts.witness_search)
            wit = potential_good_reduction_search(phin, v, opts.witness_bound);
        if (wit) {
            out.value = witness_height_value(phin, x, v, wit->witness, wit->content) + offset;
            out.error_bound = 0;
            out.exact = true;
            return out;
        }
    }
    // geometric schedule: error = R deg(v) / (d^l (d-1)) <= target
    Rat denom = Rat(d - 1);
    long ell = 1;
    Rat dpow(d);
    Rat bound = Rat(R) * Rat(v.degree()) / (dpow * denom);
    while (R > 0 && bound > opts.target_error && ell < opts.max_iterations) {
        ++ell;
        dpow *= d;
        bound = Rat(R) * Rat(v.degree()) / (dpow * denom);
    }
    if (R > 0 && bound > opts.target_error)
        throw std::runtime_error("budget exceeded: target error needs more than max_iterations iterations");
    OrbitTrace tr = run_orbit(phin, x, v, ell, R);
    Int A(tr.initial_ord);
    Int D(1);
    for (long s = 0; s < ell; ++s) {
        A = A * d + tr.increments[static_cast<size_t>(s)];
        D *= d;
    }
    out.value = Rat(-v.degree()) * Rat(A) / Rat(D) + offset;
    out.error_bound = (R == 0) ? Rat(0) : bound;
    out.iterations_used = ell;
    out.exact = (R == 0);
    return out;
}

JuliaVerdict julia_membership(const HomogMap& phi, const std::vector<RatFunc>& x, const Place& v,
                              long max_iter, const std::optional<ConjWitness>& witness) {
    int d = phi.degree();
    if (d < 2) throw std::invalid_argument("filled Julia sets need degree >= 2");
    if (phi.min_coeff_ord(v) != 0) throw std::invalid_argument("map must be content-normalized at v");
    RatFunc res = resultant(phi).value;
    if (res.is_zero()) throw std::invalid_argument("singular map");
    long R = ord(res, v);
    Rat Rstar = Rat(R) * Rat(v.degree()) / Rat(d - 1);

    std::optional<PGRWitness> wit;
    if (witness) {
        Rat content;
        if (witness_normalized_res_ord(phi, *witness, v, &content) == 0) wit = PGRWitness{*witness, content};
    } else if (R == 0) {
        wit = PGRWitness{ConjWitness::identity(phi.field(), phi.n_vars()), Rat(0)};
    } else {
        wit = potential_good_reduction_search(phi, v, 2);
    }
    if (wit) {
        // F = w(pi^{-content/(d-1)} B): membership is an exact ord check
        auto ords = wit->witness.inverse_image_ords(x, v);
        Rat shift = wit->content / Rat(d - 1);
        bool inside = true;
        for (const auto& o : ords)
            if (o && *o + shift < 0) inside = false;
        if (inside) return {JuliaVerdict::Status::bounded_certified, 0, Rat(0), wit->witness, 0};
    }
    long a0 = 0;
    bool seen = false;
    for (const auto& xi : x) {
        if (xi.is_zero()) continue;
        long o = ord(xi, v);
        if (!seen || o < a0) a0 = o;
        seen = true;
    }
    if (!seen) throw std::invalid_argument("zero vector");
    Rat L = Rat(-v.degree()) * Rat(a0);
    if (L > Rstar) return {JuliaVerdict::Status::escapes, 1, L, std::nullopt, 0};
    OrbitTrace tr = run_orbit(phi, x, v, max_iter, R);
    Int A(tr.initial_ord);
    for (long s = 0; s < max_iter; ++s) {
        A = A * d + tr.increments[static_cast<size_t>(s)];
        Rat Lnext = Rat(-v.degree()) * Rat(A);
        if (Lnext > Rstar) return {JuliaVerdict::Status::escapes, s + 2, Lnext, std::nullopt, 0};
    }
    return {JuliaVerdict::Status::bounded_so_far, 0, Rat(0), std::nullopt, max_iter};
}

namespace {

HeightIdentityCheck make_check(const HeightEstimate& lhs, const HeightEstimate& rhs, const Rat& rhs_shift) {
    HeightIdentityCheck c;
    c.lhs = lhs;
    c.rhs = rhs;
    c.rhs.value += rhs_shift;
    c.allowance = lhs.error_bound + rhs.error_bound;
    Rat diff = c.lhs.value - c.rhs.value;
    if (diff < 0) diff = -diff;
    c.exact_pair = lhs.exact && rhs.exact;
    c.holds = c.exact_pair ? (diff == 0) : (diff <= c.allowance);
    return c;
}

} // namespace

HeightIdentityReport verify_height_identities(const HomogMap& phi, const LinearMap& gamma, const RatFunc& c,
                                              const std::vector<RatFunc>& x, const Place& v,
                                              const HeightOptions& opts) {
    if (c.is_zero()) throw std::invalid_argument("scaling constant must be nonzero");
    HeightIdentityReport rep;
    HeightEstimate hx = local_height(phi, x, v, opts);

    // (a) H(c x) = H(x) + log|c|
    std::vector<RatFunc> cx;
    for (const auto& xi : x) cx.push_back(xi * c);
    rep.point_scaling = make_check(local_height(phi, cx, v, opts), hx, log_abs(c, v));

    // (b) H_{c phi}(x) = H_phi(x) + log|c| / (d-1)
    rep.map_scaling = make_check(local_height(phi.scale(c), x, v, opts), hx, log_abs(c, v) / Rat(phi.degree() - 1));

    // (c) H_{g^{-1} phi g}(x) = H_phi(g x)
    HeightEstimate lhs = local_height(conjugate(phi, gamma), x, v, opts);
    HeightEstimate rhs = local_height(phi, gamma.apply(x), v, opts);
    rep.conjugation = make_check(lhs, rhs, Rat(0));

    rep.all_hold = rep.point_scaling.holds && rep.map_scaling.holds && rep.conjugation.holds;
    return rep;
}

} // namespace ffdyn
