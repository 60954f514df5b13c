#include "ffdyn/places.hpp"
#include "ffdyn/factor.hpp"

#include <algorithm>

namespace ffdyn {

Place Place::infinity(ConstantField f) {
    Place v;
    v.infinite_ = true;
    v.field_ = f;
    v.prime_ = Poly::zero(f);
    v.degree_ = 1;
    return v;
}

Place Place::finite(const Poly& prime) {
    if (prime.degree() < 1) throw std::invalid_argument("place must have positive degree");
    if (!prime.is_monic()) throw std::invalid_argument("place polynomial must be monic");
    if (!is_irreducible(prime)) throw std::invalid_argument("place polynomial must be irreducible: " + prime.to_string());
    Place v;
    v.infinite_ = false;
    v.field_ = prime.field();
    v.prime_ = prime;
    v.degree_ = prime.degree();
    return v;
}

const Poly& Place::prime() const {
    if (infinite_) throw std::invalid_argument("infinite place has no prime polynomial");
    return prime_;
}

bool Place::operator==(const Place& o) const {
    if (infinite_ != o.infinite_) return false;
    if (infinite_) return field_ == o.field_;
    return prime_ == o.prime_;
}

bool Place::operator<(const Place& o) const {
    if (infinite_ != o.infinite_) return !infinite_;
    if (infinite_) return false;
    return Poly::cmp(prime_, o.prime_) < 0;
}

std::string Place::to_string() const {
    return infinite_ ? "inf" : prime_.to_string();
}

long ord(const Poly& a, const Place& v) {
    if (a.is_zero()) throw std::invalid_argument("valuation of zero");
    if (v.is_infinite()) return -a.degree();
    long m = 0;
    Poly r = a;
    for (;;) {
        auto [q, rem] = r.divmod(v.prime());
        if (!rem.is_zero()) break;
        ++m;
        r = q;
    }
    return m;
}

long ord(const RatFunc& a, const Place& v) {
    if (a.is_zero()) throw std::invalid_argument("valuation of zero");
    return ord(a.num(), v) - ord(a.den(), v);
}

Rat log_abs(const RatFunc& a, const Place& v) {
    return Rat(-v.degree()) * Rat(ord(a, v));
}

std::vector<std::pair<Place, long>> support(const RatFunc& a) {
    if (a.is_zero()) throw std::invalid_argument("valuation of zero");
    std::vector<std::pair<Place, long>> out;
    auto fn = factorize(a.num());
    auto fd = factorize(a.den());
    for (const auto& [g, e] : fn.factors) out.emplace_back(Place::finite(g), e);
    for (const auto& [g, e] : fd.factors) {
        Place v = Place::finite(g);
        bool merged = false;
        for (auto& [w, m] : out) {
            if (w == v) {
                m -= e;
                merged = true;
                break;
            }
        }
        if (!merged) out.emplace_back(v, -static_cast<long>(e));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const auto& p) { return p.second == 0; }), out.end());
    long oinf = a.den().degree() - a.num().degree();
    if (oinf != 0) out.emplace_back(Place::infinity(a.field()), oinf);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
}

Rat product_formula_sum(const RatFunc& a) {
    Rat s(0);
    for (const auto& [v, m] : support(a)) s += Rat(v.degree()) * Rat(m);
    return s;
}

Poly residue(const RatFunc& a, const Place& v) {
    if (a.is_zero()) return Poly::zero(a.field());
    long o = ord(a, v);
    if (o < 0) throw std::invalid_argument("pole at " + v.to_string());
    if (o > 0) return Poly::zero(a.field());
    if (v.is_infinite())
        return Poly::constant(a.field(), a.field().div(a.num().leading(), a.den().leading()));
    // invert the denominator modulo the place polynomial
    Poly n = a.num() % v.prime();
    Poly d = a.den() % v.prime();
    ExtGcd e = ext_gcd(d, v.prime());
    if (e.g.degree() != 0)
        throw std::runtime_error("residue: denominator not invertible (should be a pole)");
    return (n * e.s.mul_scalar(a.field().inv(e.g.coeff(0)))) % v.prime();
}

} // namespace ffdyn
