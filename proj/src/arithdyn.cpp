#include "ffdyn/arithdyn.hpp"
#include "ffdyn/factor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace ffdyn {

namespace {

long pow_long(long b, int e) {
    long r = 1;
    while (e--) r *= b;
    return r;
}

std::vector<Place> place_union(std::vector<Place> places) {
    std::sort(places.begin(), places.end());
    places.erase(std::unique(places.begin(), places.end(), [](const Place& a, const Place& b) { return a == b; }),
                 places.end());
    return places;
}

} // namespace

// ---------------------------------------------------------------------
// Reduction reports
// ---------------------------------------------------------------------

bool good_reduction_given_coords(const HomogMap& phi, const Place& v, ReductionEntry* entry) {
    long r = res_ord(phi, v);
    if (entry) *entry = ReductionEntry{v, r, r == 0};
    return r == 0;
}

ReductionReport reduction_report(const HomogMap& phi) {
    RatFunc res = resultant(phi).value;
    if (res.is_zero()) throw std::invalid_argument("singular map");
    std::vector<Place> scan;
    for (const auto& [v, e] : support(res)) {
        (void)e;
        scan.push_back(v);
    }
    for (const auto& form : phi.forms())
        for (const auto& [m, c] : form) {
            (void)m;
            if (c.is_constant()) continue;
            for (const auto& [v, e] : support(c)) {
                (void)e;
                scan.push_back(v);
            }
        }
    scan.push_back(Place::infinity(phi.field()));
    scan = place_union(std::move(scan));
    long weight = static_cast<long>(phi.n_vars()) * pow_long(phi.degree(), phi.dim());
    ReductionReport out;
    for (const auto& v : scan) {
        long m = phi.min_coeff_ord(v);
        long r = ord(res, v) - weight * m;
        ReductionEntry e{v, r, r == 0};
        out.entries.push_back(e);
        if (!e.good) out.bad.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------
// Potential good reduction search
// ---------------------------------------------------------------------

Rat witness_normalized_res_ord(const HomogMap& phi, const ConjWitness& w, const Place& v, Rat* content) {
    HomogMap base = w.linear.is_identity() ? phi : conjugate(phi, w.linear);
    RatFunc res = resultant(base).value;
    if (res.is_zero()) throw std::invalid_argument("singular map");
    int n = phi.n_vars();
    int d = phi.degree();
    std::vector<Rat> q;
    for (const auto& s : w.diag.entries) q.push_back(s.ord_at(v));
    std::optional<Rat> mu;
    for (int i = 0; i < n; ++i)
        for (const auto& [m, c] : base.form(i)) {
            Rat o(ord(c, v));
            for (int j = 0; j < n; ++j) o += Rat(m[static_cast<size_t>(j)]) * q[static_cast<size_t>(j)];
            o -= q[static_cast<size_t>(i)];
            if (!mu || o < *mu) mu = o;
        }
    if (!mu) throw std::invalid_argument("zero map");
    if (content) *content = *mu;
    Rat detord(0);
    for (const auto& s : q) detord += s;
    long A = 0, B = 1;
    if (d >= 2) {
        ConjugationExponents ce = conjugation_exponents(phi.dim(), d);
        A = ce.A;
        B = ce.B;
    }
    long weight = static_cast<long>(n) * pow_long(d, n - 1);
    return Rat(B) * Rat(ord(res, v)) + Rat(A) * detord - Rat(weight) * (*mu);
}

namespace {

void permutations_of(int n, std::vector<std::vector<int>>& out) {
    std::vector<int> p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
}

} // namespace

std::optional<PGRWitness> potential_good_reduction_search(const HomogMap& phi, const Place& v, long bound) {
    int d = phi.degree();
    if (d < 2) throw std::invalid_argument("search needs degree >= 2");
    int n = phi.n_vars();
    long delta = d - 1;
    long span = bound * delta;
    long weight = static_cast<long>(n) * pow_long(d, n - 1);
    ConjugationExponents ce = conjugation_exponents(phi.dim(), d);

    std::vector<std::vector<int>> perms;
    permutations_of(n, perms);

    // enumerate exponent vectors q_i = k_i/delta, q_0 = 0, by total size
    std::vector<std::vector<long>> exps;
    std::vector<long> cur(static_cast<size_t>(n - 1), 0);
    std::function<void(size_t)> gen = [&](size_t pos) {
        if (pos == cur.size()) {
            exps.push_back(cur);
            return;
        }
        for (long k = -span; k <= span; ++k) {
            cur[pos] = k;
            gen(pos + 1);
        }
    };
    gen(0);
    std::sort(exps.begin(), exps.end(), [](const std::vector<long>& a, const std::vector<long>& b) {
        long sa = 0, sb = 0;
        for (long x : a) sa += std::abs(x);
        for (long x : b) sb += std::abs(x);
        if (sa != sb) return sa < sb;
        return a < b;
    });

    for (const auto& perm : perms) {
        LinearMap P = LinearMap::permutation(phi.field(), perm);
        HomogMap base = conjugate(phi, P);
        RatFunc res = resultant(base).value;
        if (res.is_zero()) throw std::invalid_argument("singular map");
        long R = ord(res, v);
        // coefficient ord data
        struct Entry {
            Monomial m;
            int form;
            long o;
        };
        std::vector<Entry> data;
        for (int i = 0; i < n; ++i)
            for (const auto& [m, c] : base.form(i)) data.push_back({m, i, ord(c, v)});
        for (const auto& k : exps) {
            // q = (0, k_1/delta, ..., k_{n-1}/delta)
            Rat sumq(0);
            for (long x : k) sumq += Rat(x, static_cast<unsigned long>(delta));
            std::optional<Rat> mu;
            for (const auto& e : data) {
                Rat o(e.o);
                for (int j = 1; j < n; ++j)
                    o += Rat(e.m[static_cast<size_t>(j)]) * Rat(k[static_cast<size_t>(j - 1)], static_cast<unsigned long>(delta));
                if (e.form >= 1) o -= Rat(k[static_cast<size_t>(e.form - 1)], static_cast<unsigned long>(delta));
                if (!mu || o < *mu) mu = o;
            }
            Rat test = Rat(ce.B) * Rat(R) + Rat(ce.A) * sumq - Rat(weight) * (*mu);
            if (test == 0) {
                std::vector<Rat> q;
                q.emplace_back(0);
                for (long x : k) q.emplace_back(Rat(x, static_cast<unsigned long>(delta)));
                ConjWitness w{P, DiagConj::place_powers(v, q)};
                // independent re-check through the generic path
                Rat content;
                Rat verify = witness_normalized_res_ord(phi, w, v, &content);
                if (verify != 0) continue;
                return PGRWitness{w, content};
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------
// Degree-one isotriviality
// ---------------------------------------------------------------------

namespace {

// characteristic polynomial of a small RatFunc matrix as a KPoly in T
KPoly char_poly(const LinearMap& m) {
    int n = m.size();
    ConstantField F = m.field();
    // T I - M over K[T]
    std::vector<std::vector<KPoly>> a(static_cast<size_t>(n), std::vector<KPoly>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            KPoly e = KPoly::constant(-m.at(i, j));
            if (i == j) e = e + KPoly::variable(F);
            a[static_cast<size_t>(i)][static_cast<size_t>(j)] = e;
        }
    // cofactor expansion; n <= 3
    std::function<KPoly(std::vector<std::vector<KPoly>>)> det = [&](std::vector<std::vector<KPoly>> mat) -> KPoly {
        size_t k = mat.size();
        if (k == 1) return mat[0][0];
        KPoly acc = KPoly::zero(F);
        for (size_t col = 0; col < k; ++col) {
            std::vector<std::vector<KPoly>> sub;
            for (size_t i = 1; i < k; ++i) {
                std::vector<KPoly> row;
                for (size_t j = 0; j < k; ++j)
                    if (j != col) row.push_back(mat[i][j]);
                sub.push_back(row);
            }
            KPoly term = mat[0][col] * det(sub);
            acc = (col % 2 == 0) ? acc + term : acc - term;
        }
        return acc;
    };
    return det(a);
}

} // namespace

CharPolyInvariants char_poly_invariants(const LinearMap& m) {
    if (m.det().is_zero()) throw std::invalid_argument("singular linear map");
    int n = m.size();
    KPoly p = char_poly(m);
    CharPolyInvariants out;
    out.det = m.det();
    for (int i = 1; i <= n; ++i) {
        RatFunc c = p.coeff(n - i);
        out.e.push_back((i % 2 == 0) ? c : -c);
    }
    for (int i = 1; i <= n; ++i)
        out.normalized.push_back(out.e[static_cast<size_t>(i - 1)].pow(n) / out.det.pow(i));
    return out;
}

namespace {

// Diagonal monomial witness for a linear map: find place exponents a_i and
// a scalar offset s with ord_v(M_ij) + a_j - a_i = s for every nonzero
// entry; solved per place by exact Gaussian elimination.
std::optional<DiagConj> linear_monomial_witness(const LinearMap& m) {
    int n = m.size();
    ConstantField F = m.field();
    // finite places only: their uniformizer powers already realize every
    // monomial scalar, and the final constancy verification covers infinity
    std::vector<Place> places;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (m.at(i, j).is_zero() || m.at(i, j).is_constant()) continue;
            for (const auto& [v, e] : support(m.at(i, j))) {
                (void)e;
                if (v.is_infinite()) continue;
                bool seen = false;
                for (const auto& w : places) seen = seen || w == v;
                if (!seen) places.push_back(v);
            }
        }
    std::vector<FormalScalar> entries(static_cast<size_t>(n), FormalScalar::one(F));
    for (const auto& v : places) {
        // unknowns: a_1..a_{n-1}, s (a_0 = 0)
        int vars = n;
        std::vector<std::vector<Rat>> rows;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (m.at(i, j).is_zero()) continue;
                std::vector<Rat> row(static_cast<size_t>(vars) + 1, Rat(0));
                if (j >= 1) row[static_cast<size_t>(j - 1)] += 1;
                if (i >= 1) row[static_cast<size_t>(i - 1)] -= 1;
                row[static_cast<size_t>(vars - 1)] = -1; // -s
                row[static_cast<size_t>(vars)] = Rat(-ord(m.at(i, j), v));
                rows.push_back(row);
            }
        // Gaussian elimination over Q
        size_t rank = 0;
        for (int col = 0; col < vars && rank < rows.size(); ++col) {
            size_t piv = rank;
            while (piv < rows.size() && rows[piv][static_cast<size_t>(col)] == 0) ++piv;
            if (piv == rows.size()) continue;
            std::swap(rows[piv], rows[rank]);
            Rat inv = Rat(1) / rows[rank][static_cast<size_t>(col)];
            for (auto& x : rows[rank]) x *= inv;
            for (size_t r = 0; r < rows.size(); ++r) {
                if (r == rank || rows[r][static_cast<size_t>(col)] == 0) continue;
                Rat f = rows[r][static_cast<size_t>(col)];
                for (size_t cc = 0; cc <= static_cast<size_t>(vars); ++cc)
                    rows[r][cc] -= f * rows[rank][cc];
            }
            ++rank;
        }
        for (size_t r = rank; r < rows.size(); ++r)
            if (rows[r][static_cast<size_t>(vars)] != 0) return std::nullopt; // inconsistent
        // read off a solution (free vars = 0)
        std::vector<Rat> sol(static_cast<size_t>(vars), Rat(0));
        for (size_t r = 0; r < rank; ++r) {
            int lead = -1;
            for (int cc = 0; cc < vars; ++cc)
                if (rows[r][static_cast<size_t>(cc)] != 0) {
                    lead = cc;
                    break;
                }
            if (lead < 0) continue;
            sol[static_cast<size_t>(lead)] = rows[r][static_cast<size_t>(vars)];
        }
        for (int i = 1; i < n; ++i) {
            FormalScalar f = FormalScalar::one(F);
            f.rad[v] = sol[static_cast<size_t>(i - 1)];
            f.canonicalize();
            entries[static_cast<size_t>(i)] = entries[static_cast<size_t>(i)].mul(f);
        }
    }
    DiagConj out;
    out.entries = entries;
    return out;
}

bool formal_model_constant_up_to_scalar(const std::vector<FormalForm>& forms, std::string* rendered) {
    // divide by a reference coefficient and ask every ratio to be constant
    const FormalScalar* ref = nullptr;
    for (const auto& f : forms)
        for (const auto& [m, s] : f) {
            (void)m;
            if (!s.is_zero() && !ref) ref = &s;
        }
    if (!ref) return false;
    FormalScalar refinv = ref->inv();
    std::ostringstream os;
    bool ok = true;
    for (size_t i = 0; i < forms.size(); ++i) {
        for (const auto& [m, s] : forms[i]) {
            FormalScalar ratio = s.mul(refinv);
            if (!ratio.is_constant()) ok = false;
        }
    }
    if (ok && rendered) {
        for (size_t i = 0; i < forms.size(); ++i) {
            os << (i ? ", " : "(");
            bool first = true;
            for (const auto& [m, s] : forms[i]) {
                FormalScalar ratio = s.mul(refinv);
                if (!first) os << " + ";
                first = false;
                os << "(" << ratio.to_string() << ")*[";
                for (size_t j = 0; j < m.size(); ++j) os << (j ? "," : "") << m[j];
                os << "]";
            }
            if (forms[i].empty()) os << "0";
        }
        os << ")";
        *rendered = os.str();
    }
    return ok;
}

} // namespace

IsotrivialityVerdict linear_isotriviality(const LinearMap& m) {
    IsotrivialityVerdict out;
    CharPolyInvariants inv = char_poly_invariants(m);
    for (size_t i = 0; i < inv.normalized.size(); ++i) {
        if (!inv.normalized[i].is_constant()) {
            out.status = IsotrivialityVerdict::Status::non_isotrivial;
            out.certificate = inv.normalized[i];
            out.certificate_kind = "charpoly-invariant e" + std::to_string(i + 1) +
                                   "^" + std::to_string(m.size()) + "/det^" + std::to_string(i + 1);
            return out;
        }
    }
    out.status = IsotrivialityVerdict::Status::isotrivial;
    // invariants are constant; look for an explicit monomial witness
    auto wit = linear_monomial_witness(m);
    if (wit) {
        auto formal = conjugate_formal(HomogMap::from_linear(m), *wit);
        std::string rendered;
        if (formal_model_constant_up_to_scalar(formal, &rendered)) {
            out.witness = ConjWitness{LinearMap::identity(m.field(), m.size()), *wit};
            out.constant_model = ConstantModel{formal, rendered};
        }
    }
    if (!out.witness)
        out.note = "isotrivial by the char-poly invariants; no monomial witness found";
    return out;
}

// ---------------------------------------------------------------------
// Multiplier spectra (N = 1)
// ---------------------------------------------------------------------

namespace {

KPoly kpoly_mod_mul(const KPoly& a, const KPoly& b, const KPoly& g) { return (a * b) % g; }

// determinant of a K-matrix by clearing denominators row-wise and running
// the fraction-free polynomial determinant; avoids rational-function swell
RatFunc ratfunc_matrix_det(const std::vector<std::vector<RatFunc>>& a, const ConstantField& F) {
    size_t n = a.size();
    std::vector<std::vector<Poly>> cleared(n, std::vector<Poly>(n, Poly::zero(F)));
    RatFunc correction = RatFunc::one(F);
    for (size_t i = 0; i < n; ++i) {
        Poly lcm = Poly::one(F);
        for (size_t j = 0; j < n; ++j) {
            const Poly& den = a[i][j].den();
            lcm = lcm * den.exact_div(gcd(lcm, den));
        }
        for (size_t j = 0; j < n; ++j) {
            RatFunc v = a[i][j] * RatFunc(lcm);
            cleared[i][j] = v.num();
        }
        correction = correction * RatFunc(lcm);
    }
    return RatFunc(poly_matrix_det(cleared, F)) / correction;
}

} // namespace

std::vector<RatFunc> multiplier_sigma(const HomogMap& phi_in, int n) {
    if (phi_in.n_vars() != 2) throw std::invalid_argument("multiplier spectra need N = 1");
    if (n < 1) throw std::invalid_argument("period must be >= 1");
    const ConstantField F = phi_in.field();
    if (resultant(phi_in).value.is_zero()) throw std::invalid_argument("singular map");
    // move infinity off the period-n locus by a constant shear
    HomogMap phi = phi_in;
    long D = pow_long(phi_in.degree(), n);
    bool moved = false;
    for (long c = 0; c < 64; ++c) {
        if (F.is_prime_field() && c >= static_cast<long>(F.p) * 2) break;
        HomogMap cand = phi_in;
        if (c > 0) {
            // conjugate by [[1, 0], [c', 1]] or its transpose variant
            LinearMap g = LinearMap::identity(F, 2);
            long cc = (c + 1) / 2;
            if (c % 2 == 1)
                g.at(1, 0) = RatFunc::constant(F, F.from_long(cc));
            else
                g.at(0, 1) = RatFunc::constant(F, F.from_long(cc));
            cand = conjugate(phi_in, g);
        }
        HomogMap it = cand.iterate(n);
        // infinity (1 : 0) is n-periodic iff the x0^D coefficient of form 1 vanishes
        Monomial top(static_cast<size_t>(2), 0);
        top[0] = static_cast<int>(D);
        if (!it.coeff(1, top).is_zero()) {
            phi = cand;
            moved = true;
            break;
        }
    }
    if (!moved) throw std::runtime_error("could not move infinity off the periodic locus");
    HomogMap phin = phi.iterate(n);
    KPoly P = phin.dehomogenize(0);
    KPoly Q = phin.dehomogenize(1);
    // clear denominators by a common u(t): w = (P'Q - PQ')/Q^2 is invariant
    Poly u = Poly::one(F);
    for (const KPoly* f : {&P, &Q})
        for (int i = 0; i <= f->degree(); ++i) {
            Poly den = f->coeff(i).den();
            u = u * den.exact_div(gcd(u, den));
        }
    P = P.mul_scalar(RatFunc(u));
    Q = Q.mul_scalar(RatFunc(u));
    KPoly G = P - KPoly::variable(F) * Q; // fixed-point form, degree D + 1
    if (G.degree() != static_cast<int>(D) + 1) throw std::runtime_error("fixed-point polynomial degenerated");
    int dim = G.degree();
    // on the zero locus of G = P - zQ the multiplier (P'Q - PQ')/Q^2
    // collapses to (P' - zQ')/Q, which keeps the pencil small
    KPoly numw = P.derivative() - KPoly::variable(F) * Q.derivative();
    KPoly den = Q;
    int dw = std::max(numw.degree(), den.degree());
    // chi(tau) = det Sylv(G, tau den - numw) / det Sylv(G, den), both with
    // the second block declared at degree dw; interpolate the monic char
    // poly of the multiplier from dim+1 nodes
    auto sylv_det = [&](const KPoly& second) {
        size_t rows = static_cast<size_t>(dim) + static_cast<size_t>(dw);
        std::vector<std::vector<Poly>> m(rows, std::vector<Poly>(rows, Poly::zero(F)));
        for (long r = 0; r < dw; ++r)
            for (int k = 0; k <= dim; ++k)
                m[static_cast<size_t>(r)][static_cast<size_t>(r + k)] = G.coeff(dim - k).num();
        for (long r = 0; r < dim; ++r)
            for (int k = 0; k <= dw; ++k)
                m[static_cast<size_t>(dw + r)][static_cast<size_t>(r + k)] = second.coeff(dw - k).num();
        return RatFunc(poly_matrix_det(m, F));
    };
    // G, numw, den have k[t] coefficients, so .num() above is exact
    RatFunc denom = sylv_det(den);
    if (denom.is_zero()) throw std::runtime_error("multiplier denominator resultant vanished");
    std::vector<Rat> nodes;
    std::vector<RatFunc> values;
    long tau = 0;
    while (static_cast<int>(nodes.size()) < dim + 1) {
        Rat node = F.reduce(Rat(tau++));
        if (F.is_prime_field() && tau > static_cast<long>(2 * F.p + 2))
            throw std::runtime_error("field too small to interpolate the multiplier char poly");
        bool fresh = true;
        for (const auto& x : nodes) fresh = fresh && x != node;
        if (!fresh) continue;
        KPoly pencil = den.mul_scalar(RatFunc::constant(F, node)) - numw;
        nodes.push_back(node);
        values.push_back(sylv_det(pencil) / denom);
    }
    KPoly chi = KPoly::zero(F);
    for (size_t i = 0; i < nodes.size(); ++i) {
        KPoly basis = KPoly::one(F);
        Rat lag(1);
        for (size_t j = 0; j < nodes.size(); ++j) {
            if (i == j) continue;
            basis = basis * KPoly(F, {RatFunc::constant(F, F.neg(nodes[j])), RatFunc::one(F)});
            lag = F.mul(lag, F.sub(nodes[i], nodes[j]));
        }
        chi = chi + basis.mul_scalar(values[i] * RatFunc::constant(F, F.inv(lag)));
    }
    if (chi.degree() != dim) throw std::runtime_error("multiplier char poly degenerated");
    chi = chi.monic();
    std::vector<RatFunc> sigma;
    for (int i = 1; i <= dim; ++i) {
        RatFunc c = chi.coeff(dim - i);
        sigma.push_back((i % 2 == 0) ? c : -c);
    }
    return sigma;
}

// ---------------------------------------------------------------------
// Preperiodic points
// ---------------------------------------------------------------------

namespace {

bool projectively_equal(const std::vector<RatFunc>& a, const std::vector<RatFunc>& b) {
    // rank-1 test via all 2x2 minors
    size_t n = a.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (!(a[i] * b[j] - a[j] * b[i]).is_zero()) return false;
    return true;
}

} // namespace

PreperSet preperiodic_points(const HomogMap& phi, int n, int m) {
    if (phi.n_vars() != 2) throw std::invalid_argument("K-rational preperiodic search needs N = 1");
    if (n < 1 || m < 0) throw std::invalid_argument("need n >= 1, m >= 0");
    const ConstantField F = phi.field();
    if (resultant(phi).value.is_zero()) throw std::invalid_argument("singular map");
    HomogMap hi = phi.iterate(n + m);
    KPoly f;
    long D;
    if (m == 0) {
        KPoly P = hi.dehomogenize(0), Q = hi.dehomogenize(1);
        f = P - KPoly::variable(F) * Q;
        D = pow_long(phi.degree(), n) + 1;
    } else {
        HomogMap lo = phi.iterate(m);
        f = hi.dehomogenize(0) * lo.dehomogenize(1) - hi.dehomogenize(1) * lo.dehomogenize(0);
        D = pow_long(phi.degree(), n + m) + pow_long(phi.degree(), m);
    }
    PreperSet out;
    out.n = n;
    out.m = m;
    if (f.is_zero()) throw std::runtime_error("fixed-point form vanished identically");
    long inf_mult = D - f.degree();
    auto verify = [&](const std::vector<RatFunc>& p) {
        std::vector<RatFunc> a = p, b = p;
        for (int i = 0; i < n + m; ++i) a = phi.evaluate(a);
        for (int i = 0; i < m; ++i) b = phi.evaluate(b);
        return projectively_equal(a, b);
    };
    if (inf_mult > 0) {
        std::vector<RatFunc> p = {RatFunc::one(F), RatFunc::zero(F)};
        if (!verify(p)) throw std::runtime_error("verification failed for the point at infinity");
        out.points.push_back({p, static_cast<int>(inf_mult)});
    }
    KPoly rem = f;
    for (const auto& [r, mult] : k_rational_roots(f)) {
        std::vector<RatFunc> p = {r, RatFunc::one(F)};
        if (!verify(p)) throw std::runtime_error("verification failed for a computed preperiodic point");
        out.points.push_back({p, mult});
        KPoly lin(F, {-r, RatFunc::one(F)});
        for (int i = 0; i < mult; ++i) rem = rem / lin;
    }
    if (rem.degree() >= 1) {
        KPoly mono = rem.monic();
        out.unresolved.push_back({mono, mono.degree(), 1, mono.degree() <= 3});
    }
    return out;
}

std::vector<std::vector<Poly>> preperiodic_points_fq(const HomogMap& phi, int n, int m, int ext_degree, long budget) {
    const ConstantField& F = phi.field();
    if (!F.is_prime_field()) throw std::invalid_argument("exhaustive scan needs a prime field");
    for (const auto& form : phi.forms())
        for (const auto& [mono, c] : form) {
            (void)mono;
            if (!c.is_constant()) throw std::invalid_argument("exhaustive scan needs constant coefficients");
        }
    int nv = phi.n_vars();
    Poly modulus = ext_degree == 1 ? Poly::variable(F) : find_irreducible(F, ext_degree);
    long q = 1;
    for (int i = 0; i < ext_degree; ++i) q *= static_cast<long>(F.p);
    double count = std::pow(static_cast<double>(q), nv);
    if (count > static_cast<double>(budget)) throw std::runtime_error("budget exceeded");

    auto mulmod = [&](const Poly& a, const Poly& b) { return (a * b) % modulus; };
    auto eval_map = [&](const std::vector<Poly>& x) {
        std::vector<Poly> out;
        for (const auto& form : phi.forms()) {
            Poly val = Poly::zero(F);
            for (const auto& [mono, c] : form) {
                Poly term = Poly::constant(F, c.constant_value());
                for (int j = 0; j < nv; ++j)
                    for (int e = 0; e < mono[static_cast<size_t>(j)]; ++e) term = mulmod(term, x[static_cast<size_t>(j)]);
                val = (val + term) % modulus;
            }
            out.push_back(val);
        }
        return out;
    };
    auto proj_eq = [&](const std::vector<Poly>& a, const std::vector<Poly>& b) {
        for (int i = 0; i < nv; ++i)
            for (int j = i + 1; j < nv; ++j)
                if (!((mulmod(a[static_cast<size_t>(i)], b[static_cast<size_t>(j)]) -
                       mulmod(a[static_cast<size_t>(j)], b[static_cast<size_t>(i)])) % modulus)
                         .is_zero())
                    return false;
        return true;
    };
    // canonical projective representatives: first nonzero coordinate = 1
    std::vector<std::vector<Poly>> found;
    std::vector<long> odo(static_cast<size_t>(nv), 0);
    auto element = [&](long idx) {
        std::vector<Rat> c;
        for (int i = 0; i < ext_degree; ++i) {
            c.emplace_back(static_cast<unsigned long>(idx % static_cast<long>(F.p)));
            idx /= static_cast<long>(F.p);
        }
        return Poly(F, c);
    };
    for (;;) {
        size_t i = 0;
        while (i < odo.size() && ++odo[i] == q) odo[i++] = 0;
        if (i == odo.size()) break;
        std::vector<Poly> x;
        for (long v : odo) x.push_back(element(v));
        int first = -1;
        for (int j = 0; j < nv; ++j)
            if (!x[static_cast<size_t>(j)].is_zero()) {
                first = j;
                break;
            }
        if (first < 0 || !x[static_cast<size_t>(first)].is_one()) continue;
        std::vector<Poly> a = x, b = x;
        for (int s = 0; s < n + m; ++s) a = eval_map(a);
        for (int s = 0; s < m; ++s) b = eval_map(b);
        bool azero = true, bzero = true;
        for (const auto& e : a) azero = azero && e.is_zero();
        for (const auto& e : b) bzero = bzero && e.is_zero();
        if (azero || bzero) throw std::runtime_error("map vanished on a projective point (singular reduction)");
        if (proj_eq(a, b)) found.push_back(x);
    }
    return found;
}

// ---------------------------------------------------------------------
// Isotriviality pipeline (degree >= 2)
// ---------------------------------------------------------------------

namespace {

// product-formula rescale: divide out the per-place contents and test for
// constant coefficients
std::optional<std::pair<FormalScalar, std::vector<FormalForm>>> constant_after_rescale(const HomogMap& phi,
                                                                                       const ReductionReport& rr) {
    const ConstantField F = phi.field();
    RatFunc sigma = RatFunc::one(F);
    long minf = 0;
    for (const auto& e : rr.entries) {
        long mv = phi.min_coeff_ord(e.place);
        if (e.place.is_infinite())
            minf = mv;
        else if (mv != 0)
            sigma = sigma * RatFunc(e.place.prime()).pow(mv);
    }
    (void)minf;
    HomogMap scaled = phi.scale(sigma.inverse());
    for (const auto& form : scaled.forms())
        for (const auto& [m, c] : form) {
            (void)m;
            if (!c.is_constant()) return std::nullopt;
        }
    std::vector<FormalForm> forms;
    for (const auto& form : scaled.forms()) {
        FormalForm f;
        for (const auto& [m, c] : form) f.emplace(m, FormalScalar::from(c));
        forms.push_back(f);
    }
    return std::make_pair(FormalScalar::from(sigma.inverse()), forms);
}

struct VectorPreperiod {
    int i, j; // 1 <= i < j with Psi^i(e) = c * Psi^j(e)
    RatFunc c;
};

// The basis vector is known to be projectively preperiodic of type (n, m):
// the lift indices are i = max(m, 1), j = i + n.
std::optional<VectorPreperiod> vector_preperiod(const HomogMap& psi, int basis, int n, int m) {
    const ConstantField F = psi.field();
    int i = std::max(m, 1);
    int j = i + n;
    std::vector<RatFunc> cur(static_cast<size_t>(psi.n_vars()), RatFunc::zero(F));
    cur[static_cast<size_t>(basis)] = RatFunc::one(F);
    std::vector<RatFunc> at_i;
    for (int step = 1; step <= j; ++step) {
        cur = psi.evaluate(cur);
        if (step == i) at_i = cur;
    }
    if (!projectively_equal(at_i, cur)) return std::nullopt;
    for (size_t kk = 0; kk < cur.size(); ++kk) {
        if (cur[kk].is_zero()) continue;
        RatFunc c = at_i[kk] / cur[kk];
        if (c.is_zero()) return std::nullopt;
        return VectorPreperiod{i, j, c};
    }
    return std::nullopt;
}

} // namespace

IsotrivialityVerdict isotriviality(const HomogMap& phi, const IsoOptions& opts) {
    if (phi.degree() < 2) throw std::invalid_argument("use linear_isotriviality for degree one");
    IsotrivialityVerdict out;
    out.report = reduction_report(phi);

    // fast path: a global rescale already lands in constants
    if (auto fast = constant_after_rescale(phi, out.report)) {
        out.status = IsotrivialityVerdict::Status::isotrivial;
        out.witness = ConjWitness::identity(phi.field(), phi.n_vars());
        out.model_scale = fast->first;
        std::string rendered;
        formal_model_constant_up_to_scalar(fast->second, &rendered);
        out.constant_model = ConstantModel{fast->second, rendered};
        return out;
    }

    // per-place potential-good-reduction searches (diagnostics + later checks)
    std::ostringstream note;
    for (const auto& v : out.report.bad) {
        auto w = potential_good_reduction_search(phi, v, opts.witness_bound);
        note << v.to_string() << ": " << (w ? "witness found" : "no witness within bound") << "; ";
    }

    if (phi.n_vars() == 2) {
        // preperiodic-basis pipeline, cheapest (n, m) levels first; after the
        // first level the multiplier certificate (sound in either order) runs
        // before the expensive higher levels
        struct TaggedPoint {
            std::vector<RatFunc> point;
            int n, m;
        };
        std::vector<TaggedPoint> pts;
        long d = phi.degree();
        const long degree_budget = 18; // cap on d^{n+m} + d^m
        auto try_pairs = [&]() -> bool {
            if (pts.size() < 2) return false;
            for (size_t a = 0; a < pts.size(); ++a) {
                for (size_t b = 0; b < pts.size(); ++b) {
                    if (a == b) continue;
                    LinearMap A = LinearMap::from_columns({pts[a].point, pts[b].point});
                    if (A.det().is_zero()) continue;
                    HomogMap psi = conjugate(phi, A);
                    auto p0 = vector_preperiod(psi, 0, pts[a].n, pts[a].m);
                    auto p1 = vector_preperiod(psi, 1, pts[b].n, pts[b].m);
                    if (!p0 || !p1) continue;
                    DiagConj D;
                    D.entries.push_back(FormalScalar::root(p0->c, Rat(1) / Rat(pow_long(d, p0->j) - pow_long(d, p0->i))));
                    D.entries.push_back(FormalScalar::root(p1->c, Rat(1) / Rat(pow_long(d, p1->j) - pow_long(d, p1->i))));
                    auto formal = conjugate_formal(psi, D);
                    std::string rendered;
                    if (formal_model_constant_up_to_scalar(formal, &rendered)) {
                        out.status = IsotrivialityVerdict::Status::isotrivial;
                        out.witness = ConjWitness{A, D};
                        out.constant_model = ConstantModel{formal, rendered};
                        out.note = note.str();
                        return true;
                    }
                }
            }
            return false;
        };
        auto collect_level = [&](int total) {
            for (int m = 0; m < total; ++m) {
                int n = total - m;
                if (pow_long(d, n + m) + pow_long(d, m) > degree_budget) continue;
                PreperSet ps = preperiodic_points(phi, n, m);
                for (const auto& p : ps.points) {
                    bool dup = false;
                    for (const auto& q : pts) dup = dup || projectively_equal(p.point, q.point);
                    if (!dup) pts.push_back({p.point, n, m});
                }
            }
        };
        collect_level(1);
        if (try_pairs()) return out;
        // multiplier certificates before the costly levels
        int max_period = (d <= 3) ? 2 : 1; // keep the quotient algebra small
        for (int n = 1; n <= max_period; ++n) {
            std::vector<RatFunc> sigma = multiplier_sigma(phi, n);
            for (size_t i = 0; i < sigma.size(); ++i) {
                if (sigma[i].is_constant()) continue;
                // recompute from scratch before certifying
                std::vector<RatFunc> again = multiplier_sigma(phi, n);
                if (again[i].is_constant() || again[i] != sigma[i])
                    throw std::runtime_error("multiplier certificate failed re-verification");
                out.status = IsotrivialityVerdict::Status::non_isotrivial;
                out.certificate = sigma[i];
                out.certificate_kind = "multiplier-sigma" + std::to_string(i + 1) + "-period" + std::to_string(n);
                out.note = note.str();
                return out;
            }
        }
        for (int total = 2; total <= opts.max_preper_effort; ++total) {
            collect_level(total);
            if (try_pairs()) return out;
        }
    }

    out.status = IsotrivialityVerdict::Status::unknown;
    out.note = "undecided: " + note.str();
    return out;
}

IterateCheck iterate_isotriviality(const HomogMap& phi, int r, const IsoOptions& opts) {
    if (r < 1) throw std::invalid_argument("iterate exponent must be >= 1");
    IterateCheck out;
    out.base = isotriviality(phi, opts);
    HomogMap phir = phi.iterate(r);
    out.iterate = isotriviality(phir, opts);
    using S = IsotrivialityVerdict::Status;
    bool base_dec = out.base.status != S::unknown;
    bool iter_dec = out.iterate.status != S::unknown;
    out.verdicts_agree = !(base_dec && iter_dec) || out.base.status == out.iterate.status;
    // good-reduction transfer: phi^r good at v (given coords) => phi good at v
    out.reduction_transfers = true;
    std::vector<Place> places;
    for (const auto& e : out.iterate.report.entries) places.push_back(e.place);
    for (const auto& e : out.base.report.entries) places.push_back(e.place);
    places = place_union(std::move(places));
    for (const auto& v : places) {
        bool iter_good = res_ord(phir, v) == 0;
        bool base_good = res_ord(phi, v) == 0;
        if (iter_good && !base_good) {
            out.reduction_transfers = false;
            out.transfer_places.push_back(v);
        }
    }
    return out;
}

// ---------------------------------------------------------------------
// Stabilizer enumeration over F_p
// ---------------------------------------------------------------------

namespace {

bool maps_equal_up_to_scalar(const HomogMap& a, const HomogMap& b) {
    if (a.n_vars() != b.n_vars() || a.degree() != b.degree()) return false;
    RatFunc lambda = RatFunc::zero(a.field());
    for (int i = 0; i < a.n_vars(); ++i) {
        if (a.form(i).size() != b.form(i).size()) return false;
        for (const auto& [m, c] : a.form(i)) {
            RatFunc bc = b.coeff(i, m);
            if (bc.is_zero()) return false;
            RatFunc ratio = c / bc;
            if (lambda.is_zero())
                lambda = ratio;
            else if (ratio != lambda)
                return false;
        }
    }
    return !lambda.is_zero();
}

} // namespace

std::vector<LinearMap> stabilizer(const HomogMap& phi, long budget) {
    const ConstantField& F = phi.field();
    if (!F.is_prime_field()) throw std::invalid_argument("stabilizer enumeration needs a prime field");
    for (const auto& form : phi.forms())
        for (const auto& [m, c] : form) {
            (void)m;
            if (!c.is_constant()) throw std::invalid_argument("stabilizer enumeration needs constant coefficients");
        }
    int n = phi.n_vars();
    double total = std::pow(static_cast<double>(F.p), n * n);
    if (total > static_cast<double>(budget)) throw std::runtime_error("budget exceeded");
    std::vector<LinearMap> out;
    std::vector<long> odo(static_cast<size_t>(n * n), 0);
    for (;;) {
        size_t i = 0;
        while (i < odo.size() && ++odo[i] == static_cast<long>(F.p)) odo[i++] = 0;
        if (i == odo.size()) break;
        // canonical representative: first nonzero entry (row-major) is 1
        int first = -1;
        for (size_t k = 0; k < odo.size(); ++k)
            if (odo[k] != 0) {
                first = static_cast<int>(k);
                break;
            }
        if (first < 0 || odo[static_cast<size_t>(first)] != 1) continue;
        LinearMap g(F, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                g.at(r, c) = RatFunc::constant(F, Rat(static_cast<unsigned long>(odo[static_cast<size_t>(r * n + c)])));
        if (g.det().is_zero()) continue;
        if (maps_equal_up_to_scalar(conjugate(phi, g), phi)) out.push_back(g);
    }
    return out;
}

} // namespace ffdyn
