#include "ffdyn/capacity.hpp"
#include "ffdyn/arithdyn.hpp"
#include "ffdyn/resultant.hpp"

#include <algorithm>

namespace ffdyn {

namespace {

long binom(long n, long k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (long i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

RatFunc subset_det(const std::vector<const std::vector<RatFunc>*>& pts, const ConstantField& f) {
    LinearMap m(f, static_cast<int>(pts.size()));
    for (size_t j = 0; j < pts.size(); ++j)
        for (size_t i = 0; i < pts.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(j)) = (*pts[j])[i];
    return m.det();
}

} // namespace

Rat delta_log(const std::vector<std::vector<RatFunc>>& s, const Place& v) {
    if (s.empty()) throw std::invalid_argument("empty subset");
    size_t n = s[0].size();
    if (s.size() < n) throw std::invalid_argument("need at least N+1 vectors");
    const ConstantField& f = s[0][0].field();
    Rat acc(0);
    std::vector<size_t> idx(n);
    std::function<void(size_t, size_t)> rec = [&](size_t pos, size_t start) {
        if (pos == n) {
            std::vector<const std::vector<RatFunc>*> pts;
            for (size_t i : idx) pts.push_back(&s[i]);
            RatFunc d = subset_det(pts, f);
            if (d.is_zero()) throw std::domain_error("degenerate subset");
            acc += log_abs(d, v);
            return;
        }
        for (size_t i = start; i + (n - 1 - pos) < s.size(); ++i) {
            idx[pos] = i;
            rec(pos + 1, i + 1);
        }
    };
    rec(0, 0);
    return acc;
}

DiameterReport m_diameter(const PointSet& e, int M, long budget) {
    if (e.points.empty()) throw std::invalid_argument("empty point set");
    int n = static_cast<int>(e.points[0].size());
    for (const auto& p : e.points) {
        if (static_cast<int>(p.size()) != n) throw std::invalid_argument("dimension mismatch");
        bool nonzero = false;
        for (const auto& c : p) nonzero = nonzero || !c.is_zero();
        if (!nonzero) throw std::invalid_argument("zero vector in point set");
    }
    int total = static_cast<int>(e.points.size());
    if (M < n || M > total) throw std::invalid_argument("need N+1 <= M <= |E|");
    if (binom(total, M) > budget) throw std::runtime_error("budget exceeded");
    long JM = binom(M, n);
    DiameterReport out;
    out.M = M;
    out.J_M = JM;
    std::optional<Rat> best;
    std::vector<int> bestidx;
    std::vector<int> sel(static_cast<size_t>(M));
    std::function<void(int, int)> rec = [&](int pos, int start) {
        if (pos == M) {
            std::vector<std::vector<RatFunc>> sub;
            for (int i : sel) sub.push_back(e.points[static_cast<size_t>(i)]);
            try {
                Rat val = delta_log(sub, e.place) / Rat(JM);
                if (!best || val > *best) {
                    best = val;
                    bestidx = sel;
                }
            } catch (const std::domain_error&) {
                ++out.degenerate_skipped;
            }
            return;
        }
        for (int i = start; i + (M - 1 - pos) < total; ++i) {
            sel[static_cast<size_t>(pos)] = i;
            rec(pos + 1, i + 1);
        }
    };
    rec(0, 0);
    if (!best) throw std::domain_error("all subsets degenerate");
    out.log_dM = *best;
    out.attaining = bestidx;
    return out;
}

bool monotonicity_check(const PointSet& e, int m_lo, int m_hi, std::vector<DiameterReport>* reports) {
    std::optional<Rat> prev;
    bool all_degenerate_seen = false;
    bool ok = true;
    for (int M = m_lo; M <= m_hi; ++M) {
        try {
            DiameterReport r = m_diameter(e, M);
            // once every M-subset is degenerate the larger subsets are too
            if (all_degenerate_seen) ok = false;
            if (prev && r.log_dM > *prev) ok = false;
            prev = r.log_dM;
            if (reports) reports->push_back(std::move(r));
        } catch (const std::domain_error&) {
            all_degenerate_seen = true; // log d_M = -infinity from here on
        }
    }
    return ok;
}

std::vector<std::vector<Poly>> general_position_sequence(const ConstantField& k, const Poly& modulus, int N,
                                                         int count) {
    // points on the rational normal curve (1, a, ..., a^N) plus e_N: any
    // N+1 of them are linearly independent (Vandermonde)
    if (count < 1) throw std::invalid_argument("count must be positive");
    long q = -1; // infinite
    if (k.is_prime_field()) {
        q = 1;
        for (int i = 0; i < std::max(1, modulus.degree()); ++i) q *= static_cast<long>(k.p);
    }
    if (q > 0 && count > q + 1)
        throw std::invalid_argument("field too small for count (only " + std::to_string(q + 1) +
                                    " pairwise-independent directions)");
    std::vector<std::vector<Poly>> out;
    Poly mod = modulus.degree() >= 1 ? modulus : Poly::variable(k);
    auto element = [&](long idx) {
        std::vector<Rat> c;
        if (!k.is_prime_field()) return Poly::constant(k, Rat(idx));
        long p = static_cast<long>(k.p);
        for (int i = 0; i < std::max(1, mod.degree()); ++i) {
            c.emplace_back(static_cast<unsigned long>(idx % p));
            idx /= p;
        }
        return Poly(k, c);
    };
    for (long a = 0; a < count; ++a) {
        if (q > 0 && a == q) break;
        Poly x = element(a);
        std::vector<Poly> pt;
        Poly pw = Poly::one(k);
        for (int i = 0; i <= N; ++i) {
            pt.push_back(pw);
            pw = (pw * x) % mod;
        }
        out.push_back(pt);
    }
    while (static_cast<int>(out.size()) < count) {
        std::vector<Poly> inf(static_cast<size_t>(N) + 1, Poly::zero(k));
        inf[static_cast<size_t>(N)] = Poly::one(k);
        out.push_back(inf);
    }
    return out;
}

std::vector<std::vector<RatFunc>> general_position_lifts(const Place& v, int N, int count) {
    const ConstantField& k = v.field();
    Poly modulus = v.is_infinite() ? Poly::variable(k) : v.prime();
    auto residues = general_position_sequence(k, modulus, N, count);
    std::vector<std::vector<RatFunc>> out;
    for (const auto& pt : residues) {
        std::vector<RatFunc> lift;
        for (const auto& c : pt) lift.emplace_back(Poly(c));
        out.push_back(lift);
    }
    return out;
}

Rat ellipsoid_diameter(const Ellipsoid& e, const Place& v) {
    RatFunc d = e.generator.det();
    if (d.is_zero()) throw std::invalid_argument("singular generator");
    return log_abs(d, v);
}

bool ellipsoid_contains_unit_ball(const Ellipsoid& e, const Place& v) {
    LinearMap inv = e.generator.inverse();
    for (int i = 0; i < inv.size(); ++i)
        for (int j = 0; j < inv.size(); ++j) {
            if (inv.at(i, j).is_zero()) continue;
            if (ord(inv.at(i, j), v) < 0) return false;
        }
    return true;
}

bool ellipsoid_rigidity_check(const Ellipsoid& e, const Place& v) {
    if (!ellipsoid_contains_unit_ball(e, v)) return true; // premise empty
    if (ellipsoid_diameter(e, v) != 0) return true;
    // conclusion: generator and inverse integral with unit determinant
    const LinearMap& g = e.generator;
    LinearMap inv = g.inverse();
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.size(); ++j) {
            if (!g.at(i, j).is_zero() && ord(g.at(i, j), v) < 0) return false;
            if (!inv.at(i, j).is_zero() && ord(inv.at(i, j), v) < 0) return false;
        }
    return ord(g.det(), v) == 0;
}

JuliaDiameter julia_diameter(const HomogMap& phi, const ConjWitness& witness, const Place& v) {
    int d = phi.degree();
    if (d < 2) throw std::invalid_argument("filled Julia sets need degree >= 2");
    Rat content;
    Rat check = witness_normalized_res_ord(phi, witness, v, &content);
    if (check != 0) throw std::invalid_argument("witness does not certify nonsingular reduction at " + v.to_string());
    // F_phi = w(pi^{-content/(d-1)} B), so
    // log d_inf = log|det w| + (N+1) * content/(d-1) * deg(v)
    int n = phi.n_vars();
    Rat detord = witness.det_ord_at(v);
    Rat log_det = Rat(-v.degree()) * detord;
    Rat shift = Rat(n) * content / Rat(d - 1) * Rat(v.degree());
    JuliaDiameter out;
    out.log_diameter = log_det + shift;
    // resultant route: log d_inf = (-B/A) log|Res(phi)|_v
    ConjugationExponents ce = conjugation_exponents(phi.dim(), d);
    RatFunc res = resultant(phi).value;
    if (res.is_zero()) throw std::invalid_argument("singular map");
    out.via_resultant = Rat(-ce.B) / Rat(ce.A) * log_abs(res, v);
    out.routes_agree = out.log_diameter == out.via_resultant;
    return out;
}

} // namespace ffdyn
