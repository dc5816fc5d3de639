#ifndef TILEKIT_PRODUCTFORM_HPP
#define TILEKIT_PRODUCTFORM_HPP

#include <cstdint>
#include <vector>

#include "tilekit/integer_tile.hpp"
#include "tilekit/phitree.hpp"
#include "tilekit/polyring.hpp"

namespace tilekit {

/**
 * Product-forms over a base b: a digit set E_0 + b^{l_1}E_1 + ... built from a
 * direct-sum factorization E_0 + E_1 + ... + E_k of a complete residue system
 * mod b, optionally modulated stage by stage ("modulo product-form"): after
 * adjoining stage i the set is only pinned down modulo
 *     n_i = lcm{ s : Phi_s | K^{(i)} },
 * where K^{(i)} is the running kernel Psi_0(x)Psi_1(x^{b^{l_1}})...; any
 * representative of each residue class may be chosen. Offsets record that
 * choice explicitly so a chain replays bit-for-bit.
 */

struct ProductFormStage {
    DigitSet part;                       // E_i
    std::int64_t exponent = 0;           // l_i; the stage is scaled by b^{l_i}
    std::int64_t modulus = 0;            // n_i; 0 on input = "compute for me"
    // One entry per element of the stage's running direct sum (ascending
    // order), each a multiple of modulus. Empty = all zero.
    std::vector<std::int64_t> offsets;
};

struct ProductFormChain {
    std::int64_t base = 0;
    std::vector<ProductFormStage> stages;
    std::int64_t order = 1;                   // nesting depth (1 = plain modulo product-form)
    DigitSet resulting_set;
    IntPoly kernel;                           // running kernel after the last stage
    std::vector<std::int64_t> kernel_nodes;   // cyclotomic indices of kernel, ascending
};

// Strict product-form: parts[0] + b^{l[1]}parts[1] + ... The unscaled parts
// must direct-sum to a complete residue system mod b; l must start at 0 and
// be non-decreasing. Throws NotAFactorization / CollisionInSum.
DigitSet make_product_form(const std::vector<DigitSet>& parts,
                           const std::vector<std::int64_t>& l_exps,
                           std::int64_t b);

// Modulo product-form: runs the chain's stages, recomputing every modulus
// from the running kernel (a declared nonzero modulus that disagrees throws
// ModulusMismatch) and applying the stored offsets. On return the chain
// carries the computed moduli, kernel, and resulting set. The running kernel
// is verified to divide each stage's mask (KernelDivisionFailed otherwise).
DigitSet make_modulo_product_form(ProductFormChain& chain);

// Replays a completed chain exactly as stored: no modulus recomputation and
// no kernel bookkeeping, just scaled direct sums plus offsets. This is the
// "reproduces resulting_set" contract of an extracted chain.
DigitSet replay_chain(const ProductFormChain& chain);

// k-th-order form: layers[0] is an ordinary modulo product-form over Z_b;
// each later layer re-decomposes the previous layer's resulting set (exact
// direct sum, else LayerNotAFactorization) and modulates with moduli drawn
// from the previous layer's kernel. Every layer is completed in place.
DigitSet order_k_execute(std::vector<ProductFormChain>& layers);

/**
 * Kernel polynomials for b = p^alpha q (alpha >= 1, p, q distinct primes).
 * Parameters follow the prime-power spectrum
 *   case (i):  S_D = {p} u {p^{m_j a + j}}_{j=2..a} u {q^n}   (types I, II)
 *   case (ii): S_D = {p^{m_j a + j}}_{j=1..a} u {q}           (type III)
 * m and l are indexed by j (slot 0 unused, size alpha+1); types I/II require
 * m[1] = 0. Type II also takes l[j] in [1, m[j]+2] for j >= 2, at least one
 * l[j] <= m[j]+1, and derives M = max(m[j]-l[j]), k = max j attaining M.
 */

enum class KernelType { I, II, III };

struct KernelSpec {
    KernelType type = KernelType::I;
    std::int64_t p = 0, q = 0;
    std::int64_t alpha = 1;
    std::int64_t n = 0;                  // q-exponent of the spectrum (1 for type III)
    std::vector<std::int64_t> m;         // size alpha+1, m[j] for j = 1..alpha
    std::vector<std::int64_t> l;         // type II only: size alpha+1, l[j] for j >= 2
    std::int64_t big_m = 0;              // M (type II)
    std::int64_t k = 0;                  // largest j with m[j]-l[j] = M (type II)
    std::int64_t base = 0;               // p^alpha * q
    IntPoly polynomial;                  // the full displayed kernel
    // A certified blocking for base b. For type II these are the nodes of the
    // reduced kernel (the replacement-node form); the indices the full kernel
    // carries beyond them are listed in optional_nodes.
    std::vector<std::int64_t> blocking_nodes;
    std::vector<std::int64_t> optional_nodes;
};

// Validates parameters (ParameterOutOfRange), expands the displayed factors
// exactly, and verifies blocking_nodes against the base-b tree.
KernelSpec kernel_build(KernelType type, std::int64_t p, std::int64_t q,
                        std::int64_t alpha, std::int64_t n,
                        std::vector<std::int64_t> m,
                        std::vector<std::int64_t> l = {});

// The displayed digit set of a kernel: stages sorted so the powers of b are
// non-decreasing, no modulation. Its mask equals spec.polynomial (verified).
DigitSet canonical_digit_set(const KernelSpec& spec);

// The same set as a completed chain (zero offsets, kernel-factor moduli).
ProductFormChain canonical_chain(const KernelSpec& spec);

/**
 * Classification of an anchored digit set d with #d = b:
 *   - b = p^alpha:   the prime-power chain decides and describes d;
 *   - b = p^alpha q: the phi-tree decides; on ACCEPT the prime-power spectrum
 *     picks the kernel type, the kernel factors are peeled off the mask
 *     (fold at the stage modulus, exact division, degree guard), and the
 *     stages are emitted as a chain whose replay reproduces d.
 * Other bases throw UnsupportedBase.
 */

enum class BaseShape { PrimePower, PQ, PAlphaQ };

struct Classification {
    std::int64_t base = 0;
    BaseShape shape = BaseShape::PAlphaQ;
    bool accepted = false;
    TileDigitDecision decision;              // phi-tree verdict (witness on REJECT)
    std::vector<std::int64_t> spectrum;      // prime-power spectrum of the mask
    PrimePowerChain prime_power;             // shape PrimePower, accepted only
    KernelSpec kernel;                       // shapes PQ/PAlphaQ, accepted only
    ProductFormChain chain;                  // shapes PQ/PAlphaQ, accepted only
    std::vector<std::int64_t> extra_divisors; // optional kernel indices dividing the mask
    std::int64_t order = 0;                  // 1, or M+2 for type II
};

Classification classify(const DigitSet& d, std::int64_t b);

} // namespace tilekit

#endif
