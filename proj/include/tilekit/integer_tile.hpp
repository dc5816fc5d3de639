#ifndef TILEKIT_INTEGER_TILE_HPP
#define TILEKIT_INTEGER_TILE_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tilekit/polyring.hpp"
#include "tilekit/spectra.hpp"

namespace tilekit {

/** A complement B with a (+) B covering Z_n exactly once. */
struct TilingCertificate {
    DigitSet complement;
    std::int64_t period = 0;
};

// Complement of a modulo n by backtracking exact cover, or nullopt when
// none exists at this period. Deterministic: the smallest uncovered
// residue r is always covered next, trying the element beta = r before the
// other candidates in ascending order. Requires #a | n and distinct
// residues (BadPeriod).
std::optional<TilingCertificate> find_complement(const DigitSet& a, std::int64_t n);

enum class TileVerdict { Yes, No, Unknown };

struct IntegerTileResult {
    TileVerdict verdict = TileVerdict::Unknown;
    std::optional<TilingCertificate> certificate; // Yes only
    T1Result t1;
    T2Result t2;
    // Yes: how the certificate arose. "conditions" = T1 and T2 hold and the
    // complement was built at period lcm of the prime-power spectrum;
    // "search" = fallback complement search. No: "t1" or "t2" names the
    // failing condition (t2 applies only to <= 2-prime cardinalities).
    // Unknown: "exhausted".
    const char* how = "";
};

// Tri-state integer-tile decision. T1 is necessary, so its failure is
// always a No. T1 and T2 together are sufficient (complement guaranteed at
// period lcm(S_A)); for cardinalities with at most two distinct primes
// they are also necessary. The remaining gap falls back to a bounded
// complement search over periods #a * m, m <= fallback_bound.
// Requires a anchored (NotAnchored).
IntegerTileResult is_integer_tile(const DigitSet& a, int fallback_bound = 16);

// A = union over j < p of {a_j} + p*A_j where a_j = min of the class
// j mod p. Requires all p residue classes present (IncompleteResidues)
// and of equal size (UnequalClassSizes).
std::vector<std::pair<std::int64_t, DigitSet>> decompose_along_prime(const DigitSet& a,
                                                                     std::int64_t p);

/**
 * Modulo chain of an integer tile with prime-power cardinality p^alpha:
 * stages[0] = {0} and stages[i] = stages[i-1] (+) p^{k_i - 1}{0..p-1}
 * reduced mod p^{k_i}, ending at stages[alpha] = the tile itself.
 */
struct PrimePowerChain {
    std::int64_t prime = 0;
    std::vector<std::int64_t> exponents; // k_1 < ... < k_alpha
    std::vector<DigitSet> stages;        // size alpha + 1, stages[0] = {0}
};

// Recovers the chain by folding the mask at p^{k_i} and dividing by
// Phi_{p^{k_i}}, top index first; every quotient must keep 0/1
// coefficients (ChainExtractionFailed otherwise — the input was not a
// tile). Requires #a = p^alpha (NotPrimePowerCardinality) and a a
// certified integer tile (NotAnIntegerTile).
PrimePowerChain prime_power_chain(const DigitSet& a);

// Writes fold(f, n) for n = p_pow * q_pow exactly as
// P(x)*Phi_{p^v}(x^{q^u}) + Q(x)*Phi_{q^u}(x^{p^v}) with non-negative P, Q
// of degrees < n/p and < n/q. Requires f with non-negative coefficients
// and Phi_n | f (PreconditionViolated). The returned pair is verified by
// exact expansion before it is returned.
std::pair<IntPoly, IntPoly> de_bruijn_decompose(const IntPoly& f, std::int64_t p_pow,
                                                std::int64_t q_pow);

} // namespace tilekit

#endif
