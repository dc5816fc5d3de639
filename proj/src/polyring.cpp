#include "tilekit/polyring.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tilekit {

namespace {
const BigInt kZero = 0;
}

void IntPoly::normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPoly IntPoly::constant(BigInt v) {
    std::vector<BigInt> c;
    if (v != 0) c.push_back(std::move(v));
    return IntPoly(std::move(c));
}

IntPoly IntPoly::monomial(std::int64_t exp, BigInt coef) {
    if (exp < 0) throw std::invalid_argument("monomial: negative exponent");
    if (coef == 0) return IntPoly();
    std::vector<BigInt> c(static_cast<std::size_t>(exp) + 1);
    c.back() = std::move(coef);
    return IntPoly(std::move(c));
}

IntPoly IntPoly::cyclic(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("cyclic: n must be positive");
    std::vector<BigInt> c(static_cast<std::size_t>(n) + 1);
    c[0] = -1;
    c.back() = 1;
    return IntPoly(std::move(c));
}

const BigInt& IntPoly::coeff(std::int64_t e) const {
    if (e < 0 || e >= static_cast<std::int64_t>(c_.size())) return kZero;
    return c_[static_cast<std::size_t>(e)];
}

BigInt IntPoly::value_at_one() const {
    BigInt s = 0;
    for (const auto& v : c_) s += v;
    return s;
}

bool IntPoly::nonnegative() const {
    return std::all_of(c_.begin(), c_.end(), [](const BigInt& v) { return v >= 0; });
}

bool IntPoly::zero_one() const {
    return std::all_of(c_.begin(), c_.end(), [](const BigInt& v) { return v == 0 || v == 1; });
}

std::vector<std::int64_t> IntPoly::support() const {
    std::vector<std::int64_t> s;
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) s.push_back(static_cast<std::int64_t>(i));
    return s;
}

IntPoly IntPoly::substituted(std::int64_t t) const {
    if (t < 1) throw std::invalid_argument("substituted: t must be positive");
    if (is_zero()) return IntPoly();
    std::vector<BigInt> c(static_cast<std::size_t>(degree() * t) + 1);
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) c[i * static_cast<std::size_t>(t)] = c_[i];
    return IntPoly(std::move(c));
}

std::string IntPoly::str() const {
    if (is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        const BigInt& v = c_[i];
        if (v == 0) continue;
        BigInt a = v < 0 ? BigInt(-v) : v;
        if (first) {
            if (v < 0) out << "-";
            first = false;
        } else {
            out << (v < 0 ? " - " : " + ");
        }
        if (i == 0) {
            out << a;
        } else {
            if (a != 1) out << a << "*";
            out << "x";
            if (i > 1) out << "^" << i;
        }
    }
    return out.str();
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
    std::vector<BigInt> c(std::max(a.coeffs().size(), b.coeffs().size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i < a.coeffs().size()) c[i] += a.coeffs()[i];
        if (i < b.coeffs().size()) c[i] += b.coeffs()[i];
    }
    return IntPoly(std::move(c));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
    std::vector<BigInt> c(std::max(a.coeffs().size(), b.coeffs().size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i < a.coeffs().size()) c[i] += a.coeffs()[i];
        if (i < b.coeffs().size()) c[i] -= b.coeffs()[i];
    }
    return IntPoly(std::move(c));
}

IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return IntPoly();
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    std::vector<BigInt> c(ca.size() + cb.size() - 1);
    // Iterate the sparser factor's nonzero terms on the outside; masks and
    // cyclotomic blocks are mostly zeros.
    for (std::size_t i = 0; i < ca.size(); ++i) {
        if (ca[i] == 0) continue;
        for (std::size_t j = 0; j < cb.size(); ++j) {
            if (cb[j] == 0) continue;
            c[i + j] += ca[i] * cb[j];
        }
    }
    return IntPoly(std::move(c));
}

std::pair<IntPoly, IntPoly> poly_divrem(const IntPoly& num, const IntPoly& den) {
    if (den.is_zero()) throw NonMonicDivisor("division by zero polynomial");
    const auto& d = den.coeffs();
    const BigInt& lead = d.back();
    if (lead != 1 && lead != -1)
        throw NonMonicDivisor("divisor leading coefficient must be +-1, got " + lead.str());
    if (num.degree() < den.degree()) return {IntPoly(), num};

    // Positions of the divisor's nonzero coefficients below the leading one;
    // cyclotomics in scope are sparse, so the inner loop touches few entries.
    std::vector<std::size_t> lower;
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        if (d[i] != 0) lower.push_back(i);

    std::vector<BigInt> r = num.coeffs();
    const std::size_t dd = d.size() - 1;
    std::vector<BigInt> q(r.size() - dd);
    for (std::size_t k = q.size(); k-- > 0;) {
        BigInt& top = r[k + dd];
        if (top == 0) continue;
        BigInt f = (lead == 1) ? top : BigInt(-top);
        for (std::size_t i : lower) r[k + i] -= f * d[i];
        top = 0;
        q[k] = std::move(f);
    }
    r.resize(dd);
    return {IntPoly(std::move(q)), IntPoly(std::move(r))};
}

bool divides(const IntPoly& den, const IntPoly& num) {
    if (num.is_zero()) return true;
    if (den.degree() > num.degree()) return false;
    return poly_divrem(num, den).second.is_zero();
}

std::pair<IntPoly, IntPoly> mod_cyclic(const IntPoly& p, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("mod_cyclic: n must be positive");
    const auto& c = p.coeffs();
    const std::size_t un = static_cast<std::size_t>(n);
    std::vector<BigInt> rem(std::min(c.size(), un));
    std::vector<BigInt> quot(c.size() > un ? c.size() - un : 0);
    for (std::size_t m = 0; m < c.size(); ++m) {
        if (c[m] == 0) continue;
        const std::size_t l = m % un;
        rem[l] += c[m];
        // c*x^m = c*x^l + (x^n-1) * c*x^l*(1 + x^n + ... + x^{(r-1)n}), r = m/n.
        for (std::size_t e = l; e + un <= m; e += un) quot[e] += c[m];
    }
    return {IntPoly(std::move(quot)), IntPoly(std::move(rem))};
}

IntPoly fold_mod_cyclic(const IntPoly& p, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("fold_mod_cyclic: n must be positive");
    const auto& c = p.coeffs();
    const std::size_t un = static_cast<std::size_t>(n);
    std::vector<BigInt> rem(std::min(c.size(), un));
    for (std::size_t m = 0; m < c.size(); ++m) {
        if (c[m] == 0) continue;
        rem[m % un] += c[m];
    }
    return IntPoly(std::move(rem));
}

std::int64_t exponent_gcd(const IntPoly& p) {
    if (p.coeff(0) == 0) throw ZeroConstantTerm("exponent_gcd requires a nonzero constant term");
    std::int64_t g = 0;
    const auto& c = p.coeffs();
    for (std::size_t i = 1; i < c.size(); ++i)
        if (c[i] != 0) g = std::gcd(g, static_cast<std::int64_t>(i));
    return g;
}

DigitSet::DigitSet(std::vector<std::int64_t> elems) : e_(std::move(elems)) {
    std::sort(e_.begin(), e_.end());
    if (!e_.empty() && e_.front() < 0)
        throw std::invalid_argument("DigitSet: negative element");
    if (std::adjacent_find(e_.begin(), e_.end()) != e_.end())
        throw std::invalid_argument("DigitSet: repeated element");
}

DigitSet DigitSet::range(std::int64_t k) {
    std::vector<std::int64_t> e(static_cast<std::size_t>(std::max<std::int64_t>(k, 0)));
    std::iota(e.begin(), e.end(), 0);
    return DigitSet(std::move(e));
}

std::int64_t DigitSet::max_element() const {
    if (e_.empty()) throw std::invalid_argument("max_element of empty DigitSet");
    return e_.back();
}

std::int64_t DigitSet::content_gcd() const {
    std::int64_t g = 0;
    for (auto v : e_) g = std::gcd(g, v);
    return g;
}

bool DigitSet::anchored() const {
    return !e_.empty() && e_.front() == 0 && content_gcd() == 1;
}

bool DigitSet::contains(std::int64_t v) const {
    return std::binary_search(e_.begin(), e_.end(), v);
}

DigitSet DigitSet::scaled(std::int64_t f) const {
    if (f < 0) throw std::invalid_argument("scaled: negative factor");
    std::vector<std::int64_t> e(e_);
    for (auto& v : e) v *= f;
    return DigitSet(std::move(e));
}

std::string DigitSet::str() const {
    std::ostringstream out;
    out << "{";
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (i) out << ",";
        out << e_[i];
    }
    out << "}";
    return out.str();
}

DigitSet direct_sum(const DigitSet& a, const DigitSet& b) {
    std::vector<std::int64_t> s;
    s.reserve(a.cardinality() * b.cardinality());
    for (auto x : a.elements())
        for (auto y : b.elements()) s.push_back(x + y);
    std::sort(s.begin(), s.end());
    auto dup = std::adjacent_find(s.begin(), s.end());
    if (dup != s.end())
        throw CollisionInSum("direct sum repeats the value " + std::to_string(*dup));
    return DigitSet(std::move(s));
}

IntPoly mask_polynomial(const DigitSet& d) {
    if (d.empty()) return IntPoly();
    std::vector<BigInt> c(static_cast<std::size_t>(d.max_element()) + 1);
    for (auto v : d.elements()) c[static_cast<std::size_t>(v)] = 1;
    return IntPoly(std::move(c));
}

} // namespace tilekit
