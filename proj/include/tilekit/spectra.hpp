#ifndef TILEKIT_SPECTRA_HPP
#define TILEKIT_SPECTRA_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "tilekit/polyring.hpp"

namespace tilekit {

/**
 * Cyclotomic spectrum of a mask polynomial P: the indices s > 1 with
 * Phi_s | P ("full"), the prime-power subset, and the latter regrouped as
 * exponent lists per prime (p -> {a : Phi_{p^a} | P}).
 */
struct Spectrum {
    std::vector<std::int64_t> full;
    std::vector<std::int64_t> prime_power;
    std::map<std::int64_t, std::vector<std::int64_t>> by_prime;
};

// Exact test Phi_s | p for s >= 2. A certified floating-point screen
// rejects most non-divisors from the nonzero coefficients alone; anything
// the screen cannot certify is settled by folding p mod x^s - 1 and exact
// division (slice comparison when s is a prime power).
bool divides_cyclotomic(const IntPoly& p, std::int64_t s);

// All s with phi(s) <= bound, ascending; candidates are generated
// multiplicatively, so no scan bound is needed. When allowed_primes is
// non-empty, only s composed of those primes are produced.
std::vector<std::int64_t> phi_bounded_indices(std::int64_t bound,
                                              const std::vector<std::int64_t>& allowed_primes = {});

// Full spectrum of a nonzero polynomial (throws ZeroPolynomial).
// Exhaustive: any s with Phi_s | p satisfies phi(s) <= deg p.
Spectrum compute_spectrum(const IntPoly& p);

// Restricted scans used on hot paths; each equals the matching subset of
// compute_spectrum(p).full.
std::vector<std::int64_t> prime_power_spectrum(const IntPoly& p);
std::vector<std::int64_t> smooth_spectrum(const IntPoly& p, std::int64_t b);

/** #A versus the product of Phi_s(1) over the prime-power spectrum. */
struct T1Result {
    bool ok = false;
    BigInt cardinality;
    BigInt product;
    std::vector<std::int64_t> factors; // the prime-power spectrum
};
T1Result check_T1(const DigitSet& a);

/**
 * For prime powers s_1,...,s_n in the spectrum over pairwise-distinct
 * primes, Phi_{s_1...s_n} must divide the mask. witness holds the first
 * failing selection (empty when ok); witness_product is 0 when the failure
 * was by degree and the product is not worth materializing.
 */
struct T2Result {
    bool ok = false;
    std::vector<std::int64_t> spectrum; // prime-power spectrum consulted
    std::vector<std::int64_t> witness;
    std::int64_t witness_product = 0;
};
T2Result check_T2(const DigitSet& a);

/** Exponent sets per prime of b and their residue classes mod alpha. */
struct PrimeStructure {
    std::int64_t prime = 0;
    int alpha = 0;
    std::vector<std::int64_t> exponents; // {a : Phi_{p^a} | P_D}
    bool complete = false;               // exponents = {0..alpha-1} mod alpha, bijectively
};
struct StructureReport {
    bool ok = false;
    std::vector<PrimeStructure> primes;
};
// Requires #d == b (throws CardinalityMismatch).
StructureReport check_spectrum_structure(const DigitSet& d, std::int64_t b);

} // namespace tilekit

#endif
