#include "ffdyn/resultant.hpp"
#include "ffdyn/factor.hpp"
#include "ffdyn/parser.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

namespace ffdyn {

namespace {

void gen_monomials(int nvars, int deg, Monomial& cur, int pos, std::vector<Monomial>& out) {
    if (pos == nvars - 1) {
        cur[static_cast<size_t>(pos)] = deg;
        out.push_back(cur);
        return;
    }
    for (int e = deg; e >= 0; --e) {
        cur[static_cast<size_t>(pos)] = e;
        gen_monomials(nvars, deg - e, cur, pos + 1, out);
    }
}

std::vector<Monomial> monomials_of_degree(int nvars, int deg) {
    std::vector<Monomial> out;
    Monomial cur(static_cast<size_t>(nvars), 0);
    gen_monomials(nvars, deg, cur, 0, out);
    return out;
}

// Fraction-free Bareiss determinant over k[t].
Poly bareiss_det(std::vector<std::vector<Poly>> a, const ConstantField& F) {
    size_t n = a.size();
    if (n == 0) return Poly::one(F);
    int sign = 1;
    Poly prev = Poly::one(F);
    for (size_t k = 0; k + 1 < n; ++k) {
        size_t piv = k;
        while (piv < n && a[piv][k].is_zero()) ++piv;
        if (piv == n) return Poly::zero(F);
        if (piv != k) {
            std::swap(a[piv], a[k]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                Poly num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                a[i][j] = num.exact_div(prev);
            }
            a[i][k] = Poly::zero(F);
        }
        prev = a[k][k];
    }
    Poly d = a[n - 1][n - 1];
    return sign < 0 ? -d : d;
}

// Machine-word evaluation/interpolation path for prime fields with
// p < 2^31; products stay below 2^62.
std::optional<Poly> interp_det_u64(const std::vector<std::vector<Poly>>& a, const ConstantField& F) {
    size_t n = a.size();
    unsigned long long p = F.p;
    long bound = 0;
    for (size_t i = 0; i < n; ++i) {
        int rowmax = 0;
        for (size_t j = 0; j < n; ++j) rowmax = std::max(rowmax, a[i][j].degree());
        bound += rowmax;
    }
    if (p < static_cast<unsigned long long>(bound + 2)) return std::nullopt;
    auto inv_mod = [&](unsigned long long x) {
        // Fermat
        unsigned long long r = 1, b = x % p, e = p - 2;
        while (e) {
            if (e & 1) r = r * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return r;
    };
    // coefficient tables
    std::vector<std::vector<std::vector<unsigned long long>>> coef(n);
    for (size_t i = 0; i < n; ++i) {
        coef[i].resize(n);
        for (size_t j = 0; j < n; ++j) {
            const Poly& q = a[i][j];
            for (int k = 0; k <= q.degree(); ++k)
                coef[i][j].push_back(mpz_get_ui(Int(q.coeff(k).get_num()).get_mpz_t()) % p);
        }
    }
    size_t npts = static_cast<size_t>(bound) + 1;
    std::vector<unsigned long long> xs(npts), ys(npts);
    std::vector<std::vector<unsigned long long>> m(n, std::vector<unsigned long long>(n));
    for (size_t kpt = 0; kpt < npts; ++kpt) {
        unsigned long long x = kpt;
        xs[kpt] = x;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                unsigned long long v = 0;
                const auto& c = coef[i][j];
                for (size_t k = c.size(); k-- > 0;) v = (v * x + c[k]) % p;
                m[i][j] = v;
            }
        unsigned long long det = 1;
        bool zero = false;
        auto work = m;
        for (size_t col = 0; col < n && !zero; ++col) {
            size_t piv = col;
            while (piv < n && work[piv][col] == 0) ++piv;
            if (piv == n) {
                zero = true;
                break;
            }
            if (piv != col) {
                std::swap(work[piv], work[col]);
                det = p - det;
                if (det == p) det = 0;
            }
            det = det * work[col][col] % p;
            unsigned long long inv = inv_mod(work[col][col]);
            for (size_t row = col + 1; row < n; ++row) {
                if (work[row][col] == 0) continue;
                unsigned long long f = work[row][col] * inv % p;
                for (size_t j = col; j < n; ++j)
                    work[row][j] = (work[row][j] + p * p - f * work[col][j] % p * 1ull) % p;
            }
        }
        ys[kpt] = zero ? 0 : det % p;
    }
    // Lagrange interpolation via Newton divided differences mod p
    std::vector<unsigned long long> dd = ys;
    for (size_t level = 1; level < npts; ++level)
        for (size_t i = npts - 1; i >= level; --i) {
            unsigned long long num = (dd[i] + p - dd[i - 1]) % p;
            unsigned long long den = (xs[i] + p - xs[i - level]) % p;
            dd[i] = num * inv_mod(den) % p;
            if (i == level) break;
        }
    // expand Newton form
    std::vector<unsigned long long> poly = {dd[npts - 1]};
    for (size_t i = npts - 1; i-- > 0;) {
        // poly = poly*(x - xs[i]) + dd[i]
        poly.push_back(0);
        for (size_t k = poly.size(); k-- > 1;)
            poly[k] = (poly[k - 1] + (p - xs[i] % p) * poly[k] % p) % p;
        poly[0] = (p - xs[i] % p) * poly[0] % p;
        poly[0] = (poly[0] + dd[i]) % p;
    }
    std::vector<Rat> out;
    for (auto v : poly) out.emplace_back(static_cast<unsigned long>(v));
    return Poly(F, out);
}

// Evaluation/interpolation determinant for prime fields with enough
// elements; much faster than Bareiss on the large composed matrices.
std::optional<Poly> interp_det(const std::vector<std::vector<Poly>>& a, const ConstantField& F) {
    size_t n = a.size();
    if (n == 0) return Poly::one(F);
    long bound = 0;
    for (size_t i = 0; i < n; ++i) {
        int rowmax = 0;
        for (size_t j = 0; j < n; ++j) rowmax = std::max(rowmax, a[i][j].degree());
        bound += rowmax;
    }
    if (!F.is_prime_field() || F.p < static_cast<unsigned long>(bound + 2)) return std::nullopt;
    std::vector<Rat> xs, ys;
    for (long k = 0; k <= bound; ++k) {
        Rat x = F.reduce(Rat(k));
        std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) m[i][j] = a[i][j].eval(x);
        Rat det = F.one();
        bool zero = false;
        for (size_t col = 0; col < n && !zero; ++col) {
            size_t piv = col;
            while (piv < n && m[piv][col] == 0) ++piv;
            if (piv == n) {
                zero = true;
                break;
            }
            if (piv != col) {
                std::swap(m[piv], m[col]);
                det = F.neg(det);
            }
            det = F.mul(det, m[col][col]);
            Rat inv = F.inv(m[col][col]);
            for (size_t row = col + 1; row < n; ++row) {
                if (m[row][col] == 0) continue;
                Rat f = F.mul(m[row][col], inv);
                for (size_t j = col; j < n; ++j) m[row][j] = F.sub(m[row][j], F.mul(f, m[col][j]));
            }
        }
        xs.push_back(x);
        ys.push_back(zero ? F.zero() : det);
    }
    Poly result = Poly::zero(F);
    for (size_t i = 0; i < xs.size(); ++i) {
        Poly basis = Poly::one(F);
        Rat denom = F.one();
        for (size_t j = 0; j < xs.size(); ++j) {
            if (i == j) continue;
            basis = basis * Poly(F, {F.neg(xs[j]), F.one()});
            denom = F.mul(denom, F.sub(xs[i], xs[j]));
        }
        result = result + basis.mul_scalar(F.mul(ys[i], F.inv(denom)));
    }
    return result;
}

Int sym_mod_z(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    if (r * 2 > m) r -= m;
    return r;
}

// CRT determinant for matrices over Q: clear each row to integers, reduce
// modulo machine primes, run the u64 evaluation/interpolation determinant,
// and combine under a Hadamard-style coefficient bound.
std::optional<Poly> det_crt_z(const std::vector<std::vector<Poly>>& a_in, const ConstantField& F) {
    size_t n = a_in.size();
    std::vector<std::vector<Poly>> a = a_in;
    Rat divisor(1);
    for (size_t i = 0; i < n; ++i) {
        Int lcm(1);
        for (const auto& e : a[i])
            for (int k = 0; k <= e.degree(); ++k) {
                Int d = e.coeff(k).get_den(), g;
                mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), d.get_mpz_t());
                lcm = lcm / g * d;
            }
        if (lcm != 1) {
            for (auto& e : a[i]) e = e.mul_scalar(Rat(lcm));
            divisor *= Rat(lcm);
        }
    }
    Int maxc(0);
    int maxdeg = 0;
    for (const auto& row : a)
        for (const auto& e : row)
            for (int i = 0; i <= e.degree(); ++i) {
                Int c = abs(e.coeff(i).get_num());
                if (c > maxc) maxc = c;
                maxdeg = std::max(maxdeg, e.degree());
            }
    if (maxc == 0) return Poly::zero(F);
    // |det coeff| <= n! (maxdeg+1)^{n-1} maxc^n
    Int bound(1);
    for (size_t i = 2; i <= n; ++i) bound *= static_cast<unsigned long>(i);
    Int pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(maxdeg + 1), static_cast<unsigned long>(n - 1));
    bound *= pw;
    mpz_pow_ui(pw.get_mpz_t(), maxc.get_mpz_t(), static_cast<unsigned long>(n));
    bound *= pw;
    bound = bound * 2 + 1;

    long detdeg_bound = static_cast<long>(n) * maxdeg;
    // lazily extended pool of 31-bit primes for the u64 modular kernels
    static std::vector<unsigned long> primes;
    static Int next_candidate = Int(1) << 31;
    auto prime_at = [&](size_t idx) {
        while (primes.size() <= idx) {
            do {
                next_candidate -= 1;
            } while (mpz_probab_prime_p(next_candidate.get_mpz_t(), 30) == 0);
            primes.push_back(mpz_get_ui(next_candidate.get_mpz_t()));
        }
        return primes[idx];
    };
    Int modulus(1);
    std::vector<Rat> acc; // symmetric residues so far, ascending degree
    size_t used = 0;
    for (size_t pi = 0; pi < 4096; ++pi) {
        unsigned long p = prime_at(pi);
        if (static_cast<unsigned long>(detdeg_bound + 2) > p) return std::nullopt;
        ConstantField Fp = ConstantField::Fp(p);
        std::vector<std::vector<Poly>> ap(n, std::vector<Poly>(n, Poly::zero(Fp)));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                std::vector<Rat> c;
                for (int k = 0; k <= a[i][j].degree(); ++k) c.push_back(Fp.reduce(a[i][j].coeff(k)));
                ap[i][j] = Poly(Fp, c);
            }
        auto dp = interp_det_u64(ap, Fp);
        if (!dp) return std::nullopt;
        // CRT combine
        Int pz(p);
        std::vector<Rat> next(static_cast<size_t>(std::max(dp->degree() + 1, static_cast<int>(acc.size()))), Rat(0));
        for (size_t k = 0; k < next.size(); ++k) {
            Int prev = k < acc.size() ? Int(acc[k].get_num()) : Int(0);
            Int cur = k <= static_cast<size_t>(dp->degree()) ? Int(dp->coeff(static_cast<int>(k)).get_num()) : Int(0);
            if (used == 0) {
                next[k] = Rat(sym_mod_z(cur, pz));
            } else {
                // x = prev mod modulus, x = cur mod p
                Int minv;
                Int mred = modulus % pz;
                if (mpz_invert(minv.get_mpz_t(), mred.get_mpz_t(), pz.get_mpz_t()) == 0)
                    return std::nullopt;
                Int diff = sym_mod_z((cur - prev % pz) * minv, pz);
                next[k] = Rat(sym_mod_z(prev + diff * modulus, modulus * pz));
            }
        }
        acc = std::move(next);
        modulus *= pz;
        ++used;
        if (modulus > bound) {
            Poly result(F, acc);
            if (divisor != 1) result = result.mul_scalar(Rat(1) / divisor);
            return result;
        }
    }
    return std::nullopt; // bound too large for the prime table
}

Poly det_poly_matrix(const std::vector<std::vector<Poly>>& a, const ConstantField& F) {
    if (F.is_prime_field() && F.p < (1ul << 31) && a.size() >= 4) {
        auto fast = interp_det_u64(a, F);
        if (fast) return *fast;
    }
    if (!F.is_prime_field() && a.size() >= 6) {
        auto fast = det_crt_z(a, F);
        if (fast) return *fast;
    }
    if (a.size() >= 16) {
        auto fast = interp_det(a, F);
        if (fast) return *fast;
    }
    return bareiss_det(a, F);
}

struct MacaulayData {
    std::vector<std::vector<Poly>> numer;
    std::vector<std::vector<Poly>> minor;
    Poly form_scale;
    long per_form_weight;
};

// Macaulay matrices of the map with per-form denominators cleared.
MacaulayData macaulay_matrices(const HomogMap& phi) {
    const ConstantField& F = phi.field();
    int n = phi.n_vars();
    int d = phi.degree();
    int D = n * (d - 1) + 1;
    std::vector<std::map<Monomial, Poly>> forms(static_cast<size_t>(n));
    Poly scale = Poly::one(F);
    long weight = 1;
    for (int i = 0; i < n - 1; ++i) weight *= d; // d^N
    for (int i = 0; i < n; ++i) {
        Poly lcm = Poly::one(F);
        for (const auto& [m, c] : phi.form(i)) {
            (void)m;
            Poly den = c.den();
            lcm = lcm * den.exact_div(gcd(lcm, den));
        }
        for (const auto& [m, c] : phi.form(i)) {
            RatFunc cleared = c * RatFunc(lcm);
            forms[static_cast<size_t>(i)].emplace(m, cleared.num());
        }
        scale = scale * lcm;
    }
    auto monos = monomials_of_degree(n, D);
    std::map<Monomial, int> col;
    for (size_t j = 0; j < monos.size(); ++j) col[monos[j]] = static_cast<int>(j);

    MacaulayData out;
    out.form_scale = scale;
    out.per_form_weight = weight;
    out.numer.assign(monos.size(), std::vector<Poly>(monos.size(), Poly::zero(F)));
    std::vector<bool> dodu(monos.size(), false);
    for (size_t r = 0; r < monos.size(); ++r) {
        const Monomial& m = monos[r];
        int count = 0, idx = -1;
        for (int i = 0; i < n; ++i) {
            if (m[static_cast<size_t>(i)] >= d) {
                ++count;
                if (idx < 0) idx = i;
            }
        }
        dodu[r] = count >= 2;
        Monomial quot = m;
        quot[static_cast<size_t>(idx)] -= d;
        for (const auto& [fm, fc] : forms[static_cast<size_t>(idx)]) {
            Monomial prod = quot;
            for (int i = 0; i < n; ++i) prod[static_cast<size_t>(i)] += fm[static_cast<size_t>(i)];
            size_t cc = static_cast<size_t>(col.at(prod));
            out.numer[r][cc] = out.numer[r][cc] + fc;
        }
    }
    for (size_t r = 0; r < monos.size(); ++r) {
        if (!dodu[r]) continue;
        std::vector<Poly> row;
        for (size_t c = 0; c < monos.size(); ++c)
            if (dodu[c]) row.push_back(out.numer[r][c]);
        out.minor.push_back(std::move(row));
    }
    return out;
}

// direct Macaulay quotient; nullopt when the denominator minor vanishes
std::optional<RatFunc> resultant_direct(const HomogMap& phi) {
    const ConstantField& F = phi.field();
    MacaulayData mac = macaulay_matrices(phi);
    Poly dmin = det_poly_matrix(mac.minor, F);
    if (dmin.is_zero()) return std::nullopt;
    Poly dnum = det_poly_matrix(mac.numer, F);
    if (dnum.is_zero()) return RatFunc::zero(F);
    RatFunc res = RatFunc(dnum, dmin);
    // undo the per-form clearing: Res(q*F_i) picks up q^{d^N} per form
    RatFunc corr = RatFunc(mac.form_scale).pow(mac.per_form_weight);
    return res / corr;
}

// deterministic dense constant matrices used to dodge vanishing minors
LinearMap shear_map(const ConstantField& F, int n, int which) {
    unsigned long long state = 0x243f6a8885a308d3ull + 0x9e3779b9ull * static_cast<unsigned long long>(which);
    auto next = [&]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return (state >> 33) % 11;
    };
    for (;;) {
        LinearMap a(F, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a.at(i, j) = RatFunc::constant(F, F.from_long(static_cast<long>(next()) - 5));
        if (!a.det().is_zero()) return a;
    }
}

// Fit E in Res(Phi ∘ A) = Res(Phi) det(A)^E on a sample where both sides
// compute directly; cached per (N, d).
long right_compose_exponent(int N, int d) {
    static std::map<std::pair<int, int>, long> cache;
    auto key = std::make_pair(N, d);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const ConstantField F = ConstantField::Q();
    int n = N + 1;
    HomogMap phi = HomogMap::diagonal_power(F, n, d).scale(RatFunc::variable(F));
    LinearMap A = LinearMap::identity(F, n);
    A.at(0, n - 1) = RatFunc::constant(F, Rat(2));
    A.at(0, 0) = RatFunc::constant(F, Rat(3));
    auto r0 = resultant_direct(phi);
    auto r1 = resultant_direct(phi.compose(HomogMap::from_linear(A)));
    if (!r0 || !r1 || r0->is_zero()) throw std::runtime_error("resultant calibration failed");
    RatFunc ratio = *r1 / *r0; // = det(A)^E = 3^E
    if (!ratio.is_constant()) throw std::runtime_error("resultant calibration failed");
    Rat val = ratio.constant_value();
    long e = 0;
    Rat acc(1);
    while (acc != val && e < 400) {
        acc *= 3;
        ++e;
    }
    if (acc != val) throw std::runtime_error("resultant calibration failed");
    cache[key] = e;
    return e;
}

RatFunc resultant_value(const HomogMap& phi) {
    auto direct = resultant_direct(phi);
    if (direct) return *direct;
    const ConstantField& F = phi.field();
    int n = phi.n_vars();
    long E = right_compose_exponent(n - 1, phi.degree());
    for (int which = 0; which < 12; ++which) {
        LinearMap A = shear_map(F, n, which);
        HomogMap composed = phi.compose(HomogMap::from_linear(A));
        auto r = resultant_direct(composed);
        if (!r) continue;
        RatFunc detA = A.det();
        return *r / detA.pow(E);
    }
    throw std::runtime_error("resultant: all generic coordinate changes degenerate");
}

} // namespace

Poly poly_matrix_det(const std::vector<std::vector<Poly>>& a, const ConstantField& F) {
    return det_poly_matrix(a, F);
}

ResultantValue resultant(const HomogMap& phi) {
    ResultantValue out;
    if (phi.is_degenerate()) {
        out.value = RatFunc::zero(phi.field());
        out.degenerate = true;
        return out;
    }
    out.value = resultant_value(phi);
    return out;
}

long res_ord(const HomogMap& phi, const Place& v) {
    auto [norm, m] = phi.normalize_at(v);
    (void)m;
    ResultantValue r = resultant(norm);
    if (r.value.is_zero()) throw std::invalid_argument("singular map");
    return ord(r.value, v);
}

namespace {

HomogMap random_map(const ConstantField& F, int nvars, int d, std::mt19937_64& rng) {
    auto monos = monomials_of_degree(nvars, d);
    for (;;) {
        HomogMap phi(F, nvars, d);
        for (int i = 0; i < nvars; ++i)
            for (const auto& m : monos) {
                long c0 = static_cast<long>(rng() % 7) - 3;
                long c1 = static_cast<long>(rng() % 3) - 1;
                Poly p(F, {F.reduce(Rat(c0)), F.reduce(Rat(c1))});
                if (p.is_zero()) continue;
                phi.set_coeff(i, m, RatFunc(p));
            }
        if (phi.is_degenerate()) continue;
        auto r = resultant(phi);
        if (!r.value.is_zero()) return phi;
    }
}

} // namespace

bool scaling_exponent_check(int N, int d, unsigned long long seed) {
    bool supported = (N == 1 && d >= 1 && d <= 3) || (N == 2 && d == 2);
    if (!supported) throw std::invalid_argument("unsupported grid point");
    const ConstantField F = ConstantField::Q();
    std::mt19937_64 rng(seed * 977 + static_cast<unsigned long long>(100 * N + d));
    long exponent = N + 1;
    for (int i = 0; i < N; ++i) exponent *= d;
    // Res(c phi) / Res(phi) and c^E are polynomial in c of degree E, so
    // agreement at E+1 distinct scalars certifies the identity symbolically.
    int trials = (N == 2) ? 2 : 3;
    for (int trial = 0; trial < trials; ++trial) {
        HomogMap phi = random_map(F, N + 1, d, rng);
        RatFunc res = resultant(phi).value;
        for (long j = 0; j <= exponent; ++j) {
            RatFunc c = j == 0 ? RatFunc(Poly(F, {Rat(-3), Rat(1)})) // one non-constant witness value
                               : RatFunc::constant(F, Rat(j));
            RatFunc lhs = resultant(phi.scale(c)).value;
            if (lhs != c.pow(exponent) * res) return false;
        }
    }
    return true;
}

CompositionExponents fit_composition_exponents(int N, int d, int dp, unsigned long long seed) {
    if (N < 1 || N > 2 || d < 1 || dp < 1 || d * dp > 9 || (N == 2 && d * dp > 4))
        throw std::invalid_argument("unsupported grid point");
    // over a big prime field the composed Macaulay determinant interpolates
    const ConstantField F = (N == 2) ? ConstantField::Fp(40009) : ConstantField::Q();
    std::mt19937_64 rng(seed * 1315423911ull + static_cast<unsigned long long>(10000 * N + 100 * d + dp));
    std::optional<std::pair<long, long>> fitted;
    int pairs_checked = 0;
    int attempts = 0;
    while (pairs_checked < 5) {
        if (++attempts > 60) throw std::runtime_error("inconsistent fits: could not assemble full-rank system");
        HomogMap phi = random_map(F, N + 1, d, rng);
        HomogMap psi = random_map(F, N + 1, dp, rng);
        RatFunc r_outer = resultant(phi).value;
        RatFunc r_inner = resultant(psi).value;
        RatFunc r_comp = resultant(phi.compose(psi)).value;
        if (r_comp.is_zero()) throw std::runtime_error("composition of nonsingular maps became singular");
        if (r_outer.is_constant() && r_inner.is_constant()) continue;
        std::vector<std::array<long, 3>> rows;
        std::vector<Place> places;
        auto note_place = [&](const Place& pl) {
            if (std::find(places.begin(), places.end(), pl) == places.end()) places.push_back(pl);
        };
        for (const auto& [pl, e] : support(r_outer)) {
            (void)e;
            note_place(pl);
        }
        for (const auto& [pl, e] : support(r_inner)) {
            (void)e;
            note_place(pl);
        }
        for (const auto& pl : places)
            rows.push_back({ord(r_outer, pl), ord(r_inner, pl), ord(r_comp, pl)});
        if (!fitted) {
            for (size_t i = 0; i < rows.size() && !fitted; ++i)
                for (size_t j = i + 1; j < rows.size() && !fitted; ++j) {
                    long det = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0];
                    if (det == 0) continue;
                    long anum = rows[i][2] * rows[j][1] - rows[i][1] * rows[j][2];
                    long bnum = rows[i][0] * rows[j][2] - rows[i][2] * rows[j][0];
                    if (anum % det != 0 || bnum % det != 0)
                        throw std::runtime_error("composition exponents not integral");
                    fitted = std::make_pair(anum / det, bnum / det);
                }
        }
        if (!fitted) continue;
        for (const auto& r : rows)
            if (fitted->first * r[0] + fitted->second * r[1] != r[2])
                throw std::runtime_error("inconsistent composition-exponent fit");
        ++pairs_checked;
    }
    return CompositionExponents{N, d, dp, fitted->first, fitted->second};
}

ConjugationExponents conjugation_exponents(int N, int d) {
    static std::map<std::pair<int, int>, ConjugationExponents> cache;
    auto key = std::make_pair(N, d);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // Res(G^{-1} ∘ ((Phi ∘ G))) through the fitted pairs (N,1,d·1) and (N,d,1)
    CompositionExponents outer = fit_composition_exponents(N, 1, d);
    CompositionExponents inner = fit_composition_exponents(N, d, 1);
    ConjugationExponents out;
    out.A = -outer.a + inner.b * outer.b;
    out.B = inner.a * outer.b;
    cache[key] = out;
    return out;
}

std::optional<std::vector<Poly>> common_root_oracle(const HomogMap& phi, int m, long budget) {
    const ConstantField& F = phi.field();
    if (!F.is_prime_field()) throw std::invalid_argument("common_root_oracle needs a prime field");
    for (const auto& form : phi.forms())
        for (const auto& [mono, c] : form) {
            (void)mono;
            if (!c.is_constant()) throw std::invalid_argument("common_root_oracle needs constant coefficients");
        }
    int n = phi.n_vars();
    double logcount = static_cast<double>(n * m) * std::log2(static_cast<double>(F.p));
    if (logcount > std::log2(static_cast<double>(budget))) throw std::runtime_error("budget exceeded");
    Poly modulus = m == 1 ? Poly::variable(F) : find_irreducible(F, m);
    long q = 1;
    for (int i = 0; i < m; ++i) q *= static_cast<long>(F.p);
    auto element = [&](long idx) {
        std::vector<Rat> c;
        for (int i = 0; i < m; ++i) {
            c.emplace_back(static_cast<unsigned long>(idx % static_cast<long>(F.p)));
            idx /= static_cast<long>(F.p);
        }
        return Poly(F, c);
    };
    std::vector<long> odo(static_cast<size_t>(n), 0);
    for (;;) {
        size_t i = 0;
        while (i < odo.size() && ++odo[i] == q) odo[i++] = 0;
        if (i == odo.size()) return std::nullopt;
        std::vector<Poly> x;
        for (long v : odo) x.push_back(element(v));
        bool allzero = true;
        for (const auto& form : phi.forms()) {
            Poly val = Poly::zero(F);
            for (const auto& [mono, c] : form) {
                Poly term = Poly::constant(F, c.constant_value());
                for (int j = 0; j < n; ++j)
                    for (int e = 0; e < mono[static_cast<size_t>(j)]; ++e)
                        term = (term * x[static_cast<size_t>(j)]) % modulus;
                val = (val + term) % modulus;
            }
            if (!val.is_zero()) {
                allzero = false;
                break;
            }
        }
        if (allzero) return x;
    }
}

} // namespace ffdyn
