#include "ffdyn/homog.hpp"
#include "ffdyn/resultant.hpp"

#include <algorithm>
#include <sstream>

namespace ffdyn {

namespace {

Monomial mono_add(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

int mono_degree(const Monomial& m) {
    int d = 0;
    for (int e : m) d += e;
    return d;
}

void form_add_into(Form& acc, const Monomial& m, const RatFunc& c) {
    if (c.is_zero()) return;
    auto it = acc.find(m);
    if (it == acc.end()) {
        acc.emplace(m, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) acc.erase(it);
    }
}

Form form_mul(const Form& a, const Form& b) {
    Form r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) form_add_into(r, mono_add(ma, mb), ca * cb);
    return r;
}

Form form_scale(const Form& a, const RatFunc& c) {
    Form r;
    for (const auto& [m, v] : a) form_add_into(r, m, v * c);
    return r;
}

Form form_pow(const Form& a, int e, int nvars, ConstantField field) {
    Form r;
    r.emplace(Monomial(static_cast<size_t>(nvars), 0), RatFunc::one(field));
    Form b = a;
    while (e) {
        if (e & 1) r = form_mul(r, b);
        b = form_mul(b, b);
        e >>= 1;
    }
    return r;
}

} // namespace

// ---------------------------------------------------------------------
// LinearMap
// ---------------------------------------------------------------------

LinearMap::LinearMap(ConstantField f, int n) : field_(f) {
    m_.assign(static_cast<size_t>(n), std::vector<RatFunc>(static_cast<size_t>(n), RatFunc::zero(f)));
}

LinearMap LinearMap::identity(ConstantField f, int n) {
    LinearMap r(f, n);
    for (int i = 0; i < n; ++i) r.at(i, i) = RatFunc::one(f);
    return r;
}

LinearMap LinearMap::diagonal(const std::vector<RatFunc>& entries) {
    LinearMap r(entries.at(0).field(), static_cast<int>(entries.size()));
    for (size_t i = 0; i < entries.size(); ++i) r.at(static_cast<int>(i), static_cast<int>(i)) = entries[i];
    return r;
}

LinearMap LinearMap::permutation(ConstantField f, const std::vector<int>& perm) {
    LinearMap r(f, static_cast<int>(perm.size()));
    for (size_t i = 0; i < perm.size(); ++i) r.at(static_cast<int>(i), perm[i]) = RatFunc::one(f);
    return r;
}

LinearMap LinearMap::from_rows(const std::vector<std::vector<RatFunc>>& rows) {
    LinearMap r(rows.at(0).at(0).field(), static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw std::invalid_argument("dimension mismatch");
        for (size_t j = 0; j < rows.size(); ++j) r.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
    return r;
}

LinearMap LinearMap::from_columns(const std::vector<std::vector<RatFunc>>& cols) {
    LinearMap r(cols.at(0).at(0).field(), static_cast<int>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != cols.size()) throw std::invalid_argument("dimension mismatch");
        for (size_t i = 0; i < cols.size(); ++i) r.at(static_cast<int>(i), static_cast<int>(j)) = cols[j][i];
    }
    return r;
}

RatFunc LinearMap::det() const {
    int n = size();
    std::vector<std::vector<RatFunc>> a = m_;
    RatFunc d = RatFunc::one(field_);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int row = col; row < n; ++row)
            if (!a[row][col].is_zero()) {
                piv = row;
                break;
            }
        if (piv < 0) return RatFunc::zero(field_);
        if (piv != col) {
            std::swap(a[piv], a[col]);
            d = -d;
        }
        d = d * a[col][col];
        RatFunc inv = a[col][col].inverse();
        for (int row = col + 1; row < n; ++row) {
            if (a[row][col].is_zero()) continue;
            RatFunc f = a[row][col] * inv;
            for (int j = col; j < n; ++j) a[row][j] = a[row][j] - f * a[col][j];
        }
    }
    return d;
}

LinearMap LinearMap::inverse() const {
    int n = size();
    std::vector<std::vector<RatFunc>> a = m_;
    LinearMap inv = identity(field_, n);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int row = col; row < n; ++row)
            if (!a[row][col].is_zero()) {
                piv = row;
                break;
            }
        if (piv < 0) throw std::invalid_argument("singular linear map");
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(inv.m_[piv], inv.m_[col]);
        }
        RatFunc f = a[col][col].inverse();
        for (int j = 0; j < n; ++j) {
            a[col][j] = a[col][j] * f;
            inv.m_[col][j] = inv.m_[col][j] * f;
        }
        for (int row = 0; row < n; ++row) {
            if (row == col || a[row][col].is_zero()) continue;
            RatFunc g = a[row][col];
            for (int j = 0; j < n; ++j) {
                a[row][j] = a[row][j] - g * a[col][j];
                inv.m_[row][j] = inv.m_[row][j] - g * inv.m_[col][j];
            }
        }
    }
    return inv;
}

LinearMap LinearMap::operator*(const LinearMap& o) const {
    int n = size();
    if (o.size() != n) throw std::invalid_argument("dimension mismatch");
    LinearMap r(field_, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            RatFunc s = RatFunc::zero(field_);
            for (int k = 0; k < n; ++k) s = s + m_[i][k] * o.m_[k][j];
            r.at(i, j) = s;
        }
    return r;
}

std::vector<RatFunc> LinearMap::apply(const std::vector<RatFunc>& x) const {
    int n = size();
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("dimension mismatch");
    std::vector<RatFunc> r(static_cast<size_t>(n), RatFunc::zero(field_));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i] = r[i] + m_[i][j] * x[j];
    return r;
}

bool LinearMap::is_identity() const {
    for (int i = 0; i < size(); ++i)
        for (int j = 0; j < size(); ++j) {
            if (i == j && !m_[i][j].is_one()) return false;
            if (i != j && !m_[i][j].is_zero()) return false;
        }
    return true;
}

std::string LinearMap::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < size(); ++i) {
        os << (i ? ", [" : "[");
        for (int j = 0; j < size(); ++j) os << (j ? ", " : "") << m_[i][j].to_string();
        os << "]";
    }
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------
// HomogMap
// ---------------------------------------------------------------------

HomogMap::HomogMap(ConstantField f, int n_vars, int degree)
    : field_(f), nvars_(n_vars), degree_(degree), forms_(static_cast<size_t>(n_vars)) {
    if (n_vars < 2) throw std::invalid_argument("need at least 2 variables");
    if (degree < 1) throw std::invalid_argument("degree must be >= 1");
}

HomogMap HomogMap::diagonal_power(ConstantField f, int n_vars, int degree) {
    HomogMap r(f, n_vars, degree);
    for (int i = 0; i < n_vars; ++i) {
        Monomial m(static_cast<size_t>(n_vars), 0);
        m[static_cast<size_t>(i)] = degree;
        r.set_coeff(i, m, RatFunc::one(f));
    }
    return r;
}

HomogMap HomogMap::from_linear(const LinearMap& lin) {
    HomogMap r(lin.field(), lin.size(), 1);
    for (int i = 0; i < lin.size(); ++i)
        for (int j = 0; j < lin.size(); ++j) {
            Monomial m(static_cast<size_t>(lin.size()), 0);
            m[static_cast<size_t>(j)] = 1;
            r.set_coeff(i, m, lin.at(i, j));
        }
    return r;
}

HomogMap HomogMap::from_rational_function(const KPoly& p, const KPoly& q) {
    ConstantField f = p.field();
    int d = std::max(p.degree(), q.degree());
    if (d < 1) throw std::invalid_argument("degree must be >= 1");
    HomogMap r(f, 2, d);
    for (int i = 0; i <= d; ++i) {
        Monomial m = {i, d - i};
        r.set_coeff(0, m, p.coeff(i));
        r.set_coeff(1, m, q.coeff(i));
    }
    return r;
}

void HomogMap::set_coeff(int form, const Monomial& mono, const RatFunc& c) {
    if (static_cast<int>(mono.size()) != nvars_) throw std::invalid_argument("dimension mismatch");
    if (mono_degree(mono) != degree_) throw std::invalid_argument("monomial degree mismatch");
    if (c.is_zero())
        forms_[static_cast<size_t>(form)].erase(mono);
    else
        forms_[static_cast<size_t>(form)][mono] = c;
}

RatFunc HomogMap::coeff(int form, const Monomial& mono) const {
    auto it = forms_[static_cast<size_t>(form)].find(mono);
    return it == forms_[static_cast<size_t>(form)].end() ? RatFunc::zero(field_) : it->second;
}

bool HomogMap::is_degenerate() const {
    for (const auto& f : forms_)
        if (f.empty()) return true;
    return false;
}

std::vector<RatFunc> HomogMap::evaluate(const std::vector<RatFunc>& x) const {
    if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("dimension mismatch");
    std::vector<RatFunc> out;
    out.reserve(static_cast<size_t>(nvars_));
    for (const auto& form : forms_) {
        RatFunc v = RatFunc::zero(field_);
        for (const auto& [m, c] : form) {
            RatFunc term = c;
            for (int j = 0; j < nvars_; ++j)
                if (m[static_cast<size_t>(j)] != 0) term = term * x[static_cast<size_t>(j)].pow(m[static_cast<size_t>(j)]);
            v = v + term;
        }
        out.push_back(v);
    }
    return out;
}

HomogMap HomogMap::compose(const HomogMap& inner) const {
    if (inner.nvars_ != nvars_) throw std::invalid_argument("dimension mismatch");
    HomogMap r(field_, nvars_, degree_ * inner.degree_);
    for (int i = 0; i < nvars_; ++i) {
        Form acc;
        for (const auto& [m, c] : forms_[static_cast<size_t>(i)]) {
            Form term;
            term.emplace(Monomial(static_cast<size_t>(nvars_), 0), c);
            for (int j = 0; j < nvars_; ++j)
                if (m[static_cast<size_t>(j)] != 0)
                    term = form_mul(term, form_pow(inner.forms_[static_cast<size_t>(j)], m[static_cast<size_t>(j)], nvars_, field_));
            for (const auto& [mm, cc] : term) form_add_into(acc, mm, cc);
        }
        r.forms_[static_cast<size_t>(i)] = std::move(acc);
    }
    return r;
}

HomogMap HomogMap::iterate(int ell) const {
    if (ell < 1) throw std::invalid_argument("iterate count must be >= 1");
    HomogMap r = *this;
    for (int i = 1; i < ell; ++i) r = compose(r);
    return r;
}

HomogMap HomogMap::scale(const RatFunc& c) const {
    if (c.is_zero()) throw std::invalid_argument("scaling by zero");
    HomogMap r = *this;
    for (auto& form : r.forms_) form = form_scale(form, c);
    return r;
}

RatFunc uniformizer(const Place& v) {
    if (v.is_infinite()) return RatFunc(Poly::one(v.field()), Poly::variable(v.field()));
    return RatFunc(v.prime());
}

long HomogMap::min_coeff_ord(const Place& v) const {
    bool seen = false;
    long m = 0;
    for (const auto& form : forms_)
        for (const auto& [mono, c] : form) {
            (void)mono;
            long o = ord(c, v);
            if (!seen || o < m) m = o;
            seen = true;
        }
    if (!seen) throw std::invalid_argument("zero map has no content");
    return m;
}

std::pair<HomogMap, long> HomogMap::normalize_at(const Place& v) const {
    long m = min_coeff_ord(v);
    if (m == 0) return {*this, 0};
    return {scale(uniformizer(v).pow(-m)), m};
}

Rat HomogMap::sup_norm_coeff(const Place& v) const {
    return Rat(-v.degree()) * Rat(min_coeff_ord(v));
}

Rat HomogMap::sup_norm_coeff(int form, const Place& v) const {
    bool seen = false;
    long m = 0;
    for (const auto& [mono, c] : forms_[static_cast<size_t>(form)]) {
        (void)mono;
        long o = ord(c, v);
        if (!seen || o < m) m = o;
        seen = true;
    }
    if (!seen) throw std::invalid_argument("zero form has no sup norm");
    return Rat(-v.degree()) * Rat(m);
}

KPoly HomogMap::dehomogenize(int form) const {
    if (nvars_ != 2) throw std::invalid_argument("dehomogenize requires N = 1");
    std::vector<RatFunc> c(static_cast<size_t>(degree_) + 1, RatFunc::zero(field_));
    for (const auto& [m, v] : forms_[static_cast<size_t>(form)]) c[static_cast<size_t>(m[0])] = v;
    return KPoly(field_, c);
}

bool HomogMap::operator==(const HomogMap& o) const {
    return nvars_ == o.nvars_ && degree_ == o.degree_ && forms_ == o.forms_;
}

std::string HomogMap::to_string() const {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < nvars_; ++i) {
        if (i) os << ", ";
        if (forms_[static_cast<size_t>(i)].empty()) {
            os << "0";
            continue;
        }
        bool first = true;
        for (auto it = forms_[static_cast<size_t>(i)].rbegin(); it != forms_[static_cast<size_t>(i)].rend(); ++it) {
            if (!first) os << " + ";
            first = false;
            const auto& [m, c] = *it;
            if (!c.is_one()) os << "(" << c.to_string() << ")*";
            bool any = false;
            for (int j = 0; j < nvars_; ++j) {
                if (m[static_cast<size_t>(j)] == 0) continue;
                if (any) os << "*";
                any = true;
                os << "x" << j;
                if (m[static_cast<size_t>(j)] > 1) os << "^" << m[static_cast<size_t>(j)];
            }
            if (!any) os << "1";
        }
    }
    os << ")";
    return os.str();
}

HomogMap conjugate(const HomogMap& phi, const LinearMap& gamma) {
    if (gamma.size() != phi.n_vars()) throw std::invalid_argument("dimension mismatch");
    LinearMap ginv = gamma.inverse(); // throws on singular
    int n = phi.n_vars();
    // phi ∘ gamma: substitute the linear forms of gamma
    std::vector<Form> lin(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            Monomial m(static_cast<size_t>(n), 0);
            m[static_cast<size_t>(k)] = 1;
            form_add_into(lin[static_cast<size_t>(j)], m, gamma.at(j, k));
        }
    std::vector<Form> inner(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        Form acc;
        for (const auto& [m, c] : phi.form(i)) {
            Form term;
            term.emplace(Monomial(static_cast<size_t>(n), 0), c);
            for (int j = 0; j < n; ++j)
                if (m[static_cast<size_t>(j)] != 0)
                    term = form_mul(term, form_pow(lin[static_cast<size_t>(j)], m[static_cast<size_t>(j)], n, phi.field()));
            for (const auto& [mm, cc] : term) form_add_into(acc, mm, cc);
        }
        inner[static_cast<size_t>(i)] = std::move(acc);
    }
    // gamma^{-1} ∘ (phi ∘ gamma)
    HomogMap r(phi.field(), n, phi.degree());
    for (int i = 0; i < n; ++i) {
        Form acc;
        for (int j = 0; j < n; ++j) {
            if (ginv.at(i, j).is_zero()) continue;
            for (const auto& [m, c] : inner[static_cast<size_t>(j)]) form_add_into(acc, m, c * ginv.at(i, j));
        }
        for (const auto& [m, c] : acc) r.set_coeff(i, m, c);
    }
    return r;
}

// ---------------------------------------------------------------------
// FormalScalar / DiagConj
// ---------------------------------------------------------------------

FormalScalar FormalScalar::from(const RatFunc& b) { return FormalScalar{b, {}, {}}; }

FormalScalar FormalScalar::root(const RatFunc& c, const Rat& exponent) {
    if (c.is_zero()) throw std::invalid_argument("root of zero");
    FormalScalar r;
    r.base = RatFunc::one(c.field());
    RatFunc unit = c;
    for (const auto& [v, e] : support(c)) {
        if (v.is_infinite()) continue;
        r.rad[v] = Rat(e) * exponent;
        unit = unit * RatFunc(v.prime()).pow(-e);
    }
    if (!unit.is_constant()) throw std::runtime_error("internal: unit part not constant");
    Rat u = unit.constant_value();
    if (u != 1) r.croots.emplace_back(u, exponent);
    r.canonicalize();
    return r;
}

FormalScalar FormalScalar::mul(const FormalScalar& o) const {
    FormalScalar r;
    r.base = base * o.base;
    if (r.base.is_zero()) return r;
    r.rad = rad;
    for (const auto& [v, q] : o.rad) r.rad[v] += q;
    r.croots = croots;
    r.croots.insert(r.croots.end(), o.croots.begin(), o.croots.end());
    r.canonicalize();
    return r;
}

FormalScalar FormalScalar::inv() const {
    FormalScalar r;
    r.base = base.inverse();
    for (const auto& [v, q] : rad) r.rad[v] = -q;
    for (const auto& [u, e] : croots) r.croots.emplace_back(u, -e);
    r.canonicalize();
    return r;
}

FormalScalar FormalScalar::pow_int(long e) const {
    FormalScalar r;
    r.base = base.pow(e);
    if (r.base.is_zero()) return r;
    for (const auto& [v, q] : rad) r.rad[v] = q * Rat(e);
    for (const auto& [u, x] : croots) r.croots.emplace_back(u, x * Rat(e));
    r.canonicalize();
    return r;
}

void FormalScalar::canonicalize() {
    if (base.is_zero()) {
        rad.clear();
        croots.clear();
        return;
    }
    for (auto it = rad.begin(); it != rad.end();) {
        Rat q = it->second;
        Int fl;
        mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
        Rat fr = q - Rat(fl);
        if (fl != 0) base = base * uniformizer(it->first).pow(fl.get_si());
        if (fr == 0) {
            it = rad.erase(it);
        } else {
            it->second = fr;
            ++it;
        }
    }
    std::vector<std::pair<Rat, Rat>> merged;
    for (const auto& [u, e] : croots) {
        bool hit = false;
        for (auto& [mu, me] : merged)
            if (mu == u) {
                me += e;
                hit = true;
                break;
            }
        if (!hit) merged.emplace_back(u, e);
    }
    croots.clear();
    for (auto& [u, e] : merged) {
        if (e == 0 || u == 1) continue;
        if (e.get_den() == 1) {
            long k = e.get_num().get_si();
            Rat factor(1);
            bool negexp = k < 0;
            unsigned long a = static_cast<unsigned long>(negexp ? -k : k);
            while (a--) factor *= u;
            if (negexp) factor = Rat(1) / factor;
            base = base * RatFunc::constant(base.field(), factor);
        } else {
            croots.emplace_back(u, e);
        }
    }
}

Rat FormalScalar::ord_at(const Place& v) const {
    if (base.is_zero()) throw std::invalid_argument("valuation of zero");
    Rat o(ord(base, v));
    if (v.is_infinite()) {
        for (const auto& [w, q] : rad) {
            if (w.is_infinite())
                o += q;
            else
                o -= q * Rat(w.prime().degree());
        }
    } else {
        auto it = rad.find(v);
        if (it != rad.end()) o += it->second;
    }
    return o;
}

bool FormalScalar::is_in_K() const { return rad.empty() && croots.empty(); }

RatFunc FormalScalar::to_ratfunc() const {
    if (!is_in_K()) throw std::invalid_argument("unresolved fractional exponent in " + to_string());
    return base;
}

bool FormalScalar::is_constant() const {
    return !base.is_zero() && rad.empty() && base.is_constant();
}

std::string FormalScalar::to_string() const {
    std::ostringstream os;
    os << base.to_string();
    for (const auto& [v, q] : rad)
        os << " * (" << v.to_string() << ")^(" << q.get_str() << ")";
    for (const auto& [u, e] : croots)
        os << " * (" << u.get_str() << ")^(" << e.get_str() << ")";
    return os.str();
}

DiagConj DiagConj::identity(ConstantField f, int n) {
    DiagConj r;
    r.entries.assign(static_cast<size_t>(n), FormalScalar::one(f));
    return r;
}

DiagConj DiagConj::place_powers(const Place& v, const std::vector<Rat>& exps) {
    DiagConj r;
    for (const Rat& q : exps) {
        FormalScalar s = FormalScalar::one(v.field());
        s.rad[v] = q;
        s.canonicalize();
        r.entries.push_back(s);
    }
    return r;
}

bool DiagConj::is_identity() const {
    for (const auto& s : entries)
        if (!s.is_in_K() || !s.base.is_one()) return false;
    return true;
}

DiagConj DiagConj::inverse() const {
    DiagConj r;
    for (const auto& s : entries) r.entries.push_back(s.inv());
    return r;
}

Rat DiagConj::det_ord_at(const Place& v) const {
    Rat o(0);
    for (const auto& s : entries) o += s.ord_at(v);
    return o;
}

std::string DiagConj::to_string() const {
    std::ostringstream os;
    os << "diag(";
    for (size_t i = 0; i < entries.size(); ++i) os << (i ? ", " : "") << entries[i].to_string();
    os << ")";
    return os.str();
}

std::vector<FormalForm> conjugate_formal(const HomogMap& phi, const DiagConj& gamma) {
    int n = phi.n_vars();
    if (static_cast<int>(gamma.entries.size()) != n) throw std::invalid_argument("dimension mismatch");
    for (const auto& s : gamma.entries)
        if (s.is_zero()) throw std::invalid_argument("singular diagonal conjugation");
    std::vector<FormalForm> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        FormalScalar sinv = gamma.entries[static_cast<size_t>(i)].inv();
        for (const auto& [m, c] : phi.form(i)) {
            FormalScalar s = FormalScalar::from(c);
            for (int j = 0; j < n; ++j)
                if (m[static_cast<size_t>(j)] != 0)
                    s = s.mul(gamma.entries[static_cast<size_t>(j)].pow_int(m[static_cast<size_t>(j)]));
            s = s.mul(sinv);
            out[static_cast<size_t>(i)].emplace(m, s);
        }
    }
    return out;
}

HomogMap conjugate(const HomogMap& phi, const DiagConj& gamma) {
    auto formal = conjugate_formal(phi, gamma);
    HomogMap r(phi.field(), phi.n_vars(), phi.degree());
    for (int i = 0; i < phi.n_vars(); ++i)
        for (const auto& [m, s] : formal[static_cast<size_t>(i)]) r.set_coeff(i, m, s.to_ratfunc());
    return r;
}

ConjWitness ConjWitness::identity(ConstantField f, int n) {
    return ConjWitness{LinearMap::identity(f, n), DiagConj::identity(f, n)};
}

bool ConjWitness::is_identity() const { return linear.is_identity() && diag.is_identity(); }

Rat ConjWitness::det_ord_at(const Place& v) const {
    RatFunc d = linear.det();
    return Rat(ord(d, v)) + diag.det_ord_at(v);
}

std::vector<std::optional<Rat>> ConjWitness::inverse_image_ords(const std::vector<RatFunc>& x, const Place& v) const {
    std::vector<RatFunc> y = linear.inverse().apply(x);
    std::vector<std::optional<Rat>> out;
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i].is_zero()) {
            out.push_back(std::nullopt);
        } else {
            out.push_back(Rat(ord(y[i], v)) - diag.entries[i].ord_at(v));
        }
    }
    return out;
}

std::string ConjWitness::to_string() const {
    std::string s;
    if (!linear.is_identity()) s += linear.to_string();
    if (!diag.is_identity()) {
        if (!s.empty()) s += " . ";
        s += diag.to_string();
    }
    return s.empty() ? "identity" : s;
}

HomogMap conjugate(const HomogMap& phi, const ConjWitness& w) {
    return conjugate(conjugate(phi, w.linear), w.diag);
}

std::vector<FormalForm> conjugate_formal(const HomogMap& phi, const ConjWitness& w) {
    return conjugate_formal(conjugate(phi, w.linear), w.diag);
}

// ---------------------------------------------------------------------
// Preimages on P^1
// ---------------------------------------------------------------------

int PreimageSet::total_multiplicity() const {
    int m = 0;
    for (const auto& p : rational) m += p.multiplicity;
    for (const auto& f : symbolic) m += f.degree * f.multiplicity;
    return m;
}

PreimageSet preimages(const HomogMap& phi, const std::vector<RatFunc>& q) {
    if (phi.n_vars() != 2) throw std::invalid_argument("preimages requires N = 1");
    if (q.size() != 2 || (q[0].is_zero() && q[1].is_zero()))
        throw std::invalid_argument("target must be a nonzero vector in K^2");
    if (resultant(phi).value.is_zero()) throw std::invalid_argument("singular map");
    const ConstantField& F = phi.field();
    // B(x0, x1) = q1*Phi_0 - q0*Phi_1 vanishes exactly on the preimages
    KPoly f = phi.dehomogenize(0).mul_scalar(q[1]) - phi.dehomogenize(1).mul_scalar(q[0]);
    int d = phi.degree();
    PreimageSet out;
    if (f.is_zero()) throw std::runtime_error("internal: preimage form vanished");
    int inf_mult = d - f.degree();
    if (inf_mult > 0)
        out.rational.push_back({{RatFunc::one(F), RatFunc::zero(F)}, inf_mult});
    KPoly rem = f;
    for (const auto& [r, m] : k_rational_roots(f)) {
        out.rational.push_back({{r, RatFunc::one(F)}, m});
        KPoly lin(F, {-r, RatFunc::one(F)});
        for (int i = 0; i < m; ++i) rem = rem / lin;
    }
    if (rem.degree() >= 1) {
        KPoly mono = rem.monic();
        out.symbolic.push_back({mono, mono.degree(), 1, mono.degree() <= 3});
    }
    return out;
}

} // namespace ffdyn
