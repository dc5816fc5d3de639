#ifndef TILEKIT_TILECHECK_HPP
#define TILEKIT_TILECHECK_HPP

#include <cstdint>
#include <vector>

#include "tilekit/polyring.hpp"

namespace tilekit {

/**
 * Radix digit system (A, D): an expanding s x s integer matrix A with
 * |det A| = b >= 2 and exactly b digit vectors in Z^s. In dimension one
 * the expansion is the scalar base.
 */
struct DigitSystem {
    std::int64_t dimension = 1;
    std::vector<std::vector<std::int64_t>> expansion; // s x s, row-major
    std::vector<std::vector<std::int64_t>> digits;    // b vectors of length s
    std::int64_t base = 0;                            // |det A|
};

// One-dimensional system: base b >= 2, digits from a DigitSet
// (cardinality must equal b, else CardinalityMismatch).
DigitSystem scalar_system(std::int64_t b, const DigitSet& d);

// Matrix system. Requires |det A| >= 2 and #digits = |det A|; every
// eigenvalue modulus must exceed 1 (numerical screen on the exact
// characteristic polynomial). assume_expanding skips the eigenvalue
// screen — the expanding hypothesis becomes the caller's responsibility
// — but never the determinant or cardinality checks.
// Throws NotExpanding / CardinalityMismatch.
DigitSystem matrix_system(std::vector<std::vector<std::int64_t>> a,
                          std::vector<std::vector<std::int64_t>> digits,
                          bool assume_expanding = false);

// Exact determinant (fraction-free elimination) and the characteristic
// polynomial coefficients c_0..c_s of det(xI - A), both exact.
std::int64_t matrix_determinant(const std::vector<std::vector<std::int64_t>>& a);
std::vector<std::int64_t> characteristic_polynomial(const std::vector<std::vector<std::int64_t>>& a);

// #D_k for D_k = {sum_{j<k} A^j d_{i_j}}, computed by exact set building.
// The level buffer must fit the memory budget (TILEKIT_BUDGET_MB, default
// 256); throws BudgetExceeded before allocating past it.
std::int64_t digit_expansion_count(const DigitSystem& sys, std::int64_t k);

/**
 * Result of the level-by-level count comparison. On failure the witnesses
 * are two distinct digit-index sequences (length = failing k, most
 * significant last) whose expansions both equal collision_value.
 */
struct CountReport {
    bool pass = false;
    std::int64_t checked_k = 0;             // K on pass, smallest failing k on fail
    std::vector<std::int64_t> counts;       // #D_k for k = 1..checked_k
    std::vector<std::size_t> witness_a, witness_b;
    std::vector<std::int64_t> collision_value;
};

// PASS iff #D_k = b^k for every k <= K. Counting failure is monotone in k
// (a collision persists under appended digits), so the scan stops at the
// first failing level and reconstructs a colliding pair there.
CountReport counting_check(const DigitSystem& sys, std::int64_t k_max);

} // namespace tilekit

#endif
