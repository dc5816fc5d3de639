#ifndef TILEKIT_POLYRING_HPP
#define TILEKIT_POLYRING_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tilekit/errors.hpp"

namespace tilekit {

using BigInt = boost::multiprecision::cpp_int;

/**
 * Dense univariate polynomial over Z with arbitrary-precision coefficients.
 * Coefficients are stored low-to-high and kept normalized: the leading
 * coefficient is nonzero unless the polynomial is zero (empty storage).
 */
class IntPoly {
public:
    IntPoly() = default;
    explicit IntPoly(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { normalize(); }

    static IntPoly constant(BigInt v);
    static IntPoly monomial(std::int64_t exp, BigInt coef = 1);
    // x^n - 1
    static IntPoly cyclic(std::int64_t n);

    bool is_zero() const { return c_.empty(); }
    // -1 for the zero polynomial
    std::int64_t degree() const { return static_cast<std::int64_t>(c_.size()) - 1; }
    const std::vector<BigInt>& coeffs() const { return c_; }
    const BigInt& coeff(std::int64_t e) const;

    BigInt value_at_one() const;
    bool nonnegative() const;
    bool zero_one() const;
    std::vector<std::int64_t> support() const;

    // x -> x^t
    IntPoly substituted(std::int64_t t) const;

    bool operator==(const IntPoly&) const = default;
    std::string str() const;

private:
    void normalize();
    std::vector<BigInt> c_;
};

IntPoly operator+(const IntPoly& a, const IntPoly& b);
IntPoly operator-(const IntPoly& a, const IntPoly& b);

// Exact product (schoolbook; desk-scale degrees).
IntPoly poly_mul(const IntPoly& a, const IntPoly& b);
inline IntPoly operator*(const IntPoly& a, const IntPoly& b) { return poly_mul(a, b); }

// Long division: num = den*q + r with deg r < deg den. The divisor must have
// leading coefficient +-1 (every divisor in scope is a monic cyclotomic
// product or x^n-1), so all arithmetic stays in Z.
std::pair<IntPoly, IntPoly> poly_divrem(const IntPoly& num, const IntPoly& den);

// True iff den divides num exactly.
bool divides(const IntPoly& den, const IntPoly& num);

// p = (x^n-1)*q + r with deg r < n, computed by exponent folding; both outputs
// have non-negative coefficients whenever p does.
std::pair<IntPoly, IntPoly> mod_cyclic(const IntPoly& p, std::int64_t n);

// Remainder half of mod_cyclic without materializing the quotient.
IntPoly fold_mod_cyclic(const IntPoly& p, std::int64_t n);

// gcd of the exponents with nonzero coefficient, exponent 0 excluded;
// 0 for constants. Requires a nonzero constant term.
std::int64_t exponent_gcd(const IntPoly& p);

/**
 * Finite set of distinct non-negative integers, kept sorted ascending.
 * "Anchored" is the standing normalization: 0 is a member and the
 * gcd of all members is 1.
 */
class DigitSet {
public:
    DigitSet() = default;
    explicit DigitSet(std::vector<std::int64_t> elems);
    // {0, 1, ..., k-1}
    static DigitSet range(std::int64_t k);

    std::size_t cardinality() const { return e_.size(); }
    bool empty() const { return e_.empty(); }
    const std::vector<std::int64_t>& elements() const { return e_; }
    std::int64_t max_element() const;
    // gcd of the nonzero elements; 0 when none.
    std::int64_t content_gcd() const;
    bool anchored() const;
    bool contains(std::int64_t v) const;

    DigitSet scaled(std::int64_t f) const;

    bool operator==(const DigitSet&) const = default;
    std::string str() const;

private:
    std::vector<std::int64_t> e_;
};

// Direct sum {a+b}; throws CollisionInSum if any sum repeats.
DigitSet direct_sum(const DigitSet& a, const DigitSet& b);

IntPoly mask_polynomial(const DigitSet& d);

} // namespace tilekit

#endif
