#ifndef TILEKIT_CYCLOTOMIC_HPP
#define TILEKIT_CYCLOTOMIC_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "tilekit/polyring.hpp"

namespace tilekit {

// --- integer factorization helpers shared across modules ---

// (prime, exponent) pairs, primes ascending; empty for n = 1.
std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n);
std::vector<std::int64_t> prime_divisors(std::int64_t n);
std::vector<std::int64_t> divisors(std::int64_t n); // ascending, includes 1 and n
std::int64_t euler_phi(std::int64_t n);
std::int64_t radical(std::int64_t n);
bool is_prime(std::int64_t n);
// True iff n = p^a with a >= 1; stores p through base when non-null.
bool is_prime_power(std::int64_t n, std::int64_t* base = nullptr);

// --- cyclotomic polynomials ---

// The d-th cyclotomic polynomial (monic, degree phi(d)), from a global
// memo table. Safe for concurrent callers; references stay valid for the
// life of the process.
const IntPoly& cyclotomic(std::int64_t d);

// Phi_d(1): p when d = p^a, 1 otherwise. d = 1 throws IndexOne unless
// allow_index_one is set, in which case the conventional 0 is returned.
BigInt cyclo_at_one(std::int64_t d, bool allow_index_one = false);

// Indices e with Phi_d(x^t) = prod_e Phi_e(x), sorted ascending.
// Computed one prime factor of t at a time: a prime p maps s to {sp} when
// p | s and to {s, sp} otherwise; primes dividing the running indices are
// applied first (the result is order-independent).
std::vector<std::int64_t> expand_substitution(std::int64_t d, std::int64_t t);

} // namespace tilekit

#endif
