#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tilekit/cyclotomic.hpp"
#include "tilekit/errors.hpp"
#include "tilekit/integer_tile.hpp"
#include "tilekit/phitree.hpp"
#include "tilekit/productform.hpp"
#include "tilekit/spectra.hpp"

using namespace tilekit;

namespace {

DigitSet ds(std::vector<std::int64_t> v) { return DigitSet(std::move(v)); }

IntPoly cyclo_product(const std::vector<std::int64_t>& indices) {
    IntPoly out = IntPoly::constant(1);
    for (std::int64_t s : indices) out = out * cyclotomic(s);
    return out;
}

std::int64_t ipow(std::int64_t b, std::int64_t e) {
    std::int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Independent replay: walk the stages with plain direct sums and offsets,
// checking the Def-3.1 congruence mask identity at every stage:
//     P_{D^(i)} - P_{D^(i-1)} * P_{E_i}(x^{b^{l_i}})  ==  0  mod  x^{n_i} - 1.
DigitSet replay_oracle(const ProductFormChain& chain) {
    DigitSet cur({0});
    for (std::size_t i = 0; i < chain.stages.size(); ++i) {
        const auto& st = chain.stages[i];
        const DigitSet raw = direct_sum(cur, st.part.scaled(ipow(chain.base, st.exponent)));
        std::vector<std::int64_t> elems = raw.elements();
        if (!st.offsets.empty()) {
            REQUIRE(st.offsets.size() == elems.size());
            for (std::size_t j = 0; j < elems.size(); ++j) {
                CHECK(st.offsets[j] % st.modulus == 0);
                elems[j] += st.offsets[j];
            }
        }
        std::sort(elems.begin(), elems.end());
        DigitSet next(elems);
        const IntPoly diff =
            mask_polynomial(next) -
            mask_polynomial(cur) * mask_polynomial(st.part).substituted(ipow(chain.base, st.exponent));
        CHECK(fold_mod_cyclic(diff, st.modulus).is_zero());
        cur = next;
    }
    return cur;
}

} // namespace

TEST_CASE("make_product_form expands scaled direct sums") {
    CHECK(make_product_form({ds({0, 1}), ds({0, 2})}, {0, 1}, 4) == ds({0, 1, 8, 9}));
    CHECK(make_product_form({ds({0, 1}), ds({0, 2})}, {0, 0}, 4) == ds({0, 1, 2, 3}));
    CHECK(make_product_form({ds({0, 1}), ds({0, 2, 4}), ds({0, 6})}, {0, 0, 1}, 12) ==
          direct_sum(ds({0, 1, 2, 3, 4, 5}), ds({0, 72})));

    // mask identity of the plain product-form
    const DigitSet d = make_product_form({ds({0, 1}), ds({0, 2})}, {0, 1}, 4);
    CHECK(mask_polynomial(d) ==
          mask_polynomial(ds({0, 1})) * mask_polynomial(ds({0, 2})).substituted(4));

    // parts covering too few / wrong residues
    CHECK_THROWS_AS(make_product_form({ds({0, 1}), ds({0, 4})}, {0, 0}, 4), NotAFactorization);
    CHECK_THROWS_AS(make_product_form({ds({0, 1}), ds({0, 2, 4})}, {0, 0}, 4), NotAFactorization);
    CHECK_THROWS_AS(make_product_form({ds({0, 1}), ds({0, 1})}, {0, 0}, 4), CollisionInSum);
    // exponent discipline
    CHECK_THROWS_AS(make_product_form({ds({0, 1}), ds({0, 2})}, {1, 1}, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_product_form({ds({0, 1}), ds({0, 2})}, {0, 1, 1}, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_product_form({ds({0, 2}), ds({0, 1})}, {0, 0}, 3), NotAFactorization);
}

TEST_CASE("make_modulo_product_form computes Def-3.1 moduli and applies offsets") {
    // zero offsets degenerate to the plain product-form
    ProductFormChain plain;
    plain.base = 4;
    plain.stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2}), 1, 0, {}}};
    CHECK(make_modulo_product_form(plain) == ds({0, 1, 8, 9}));
    CHECK(plain.stages[0].modulus == 2);
    CHECK(plain.stages[1].modulus == 16);
    CHECK(plain.kernel_nodes == std::vector<std::int64_t>{2, 16});

    // +16 on the last element of the final stage
    ProductFormChain mod4;
    mod4.base = 4;
    mod4.stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2}), 1, 0, {0, 0, 0, 16}}};
    const DigitSet d4 = make_modulo_product_form(mod4);
    CHECK(d4 == ds({0, 1, 8, 25}));
    CHECK(mod4.kernel == cyclo_product({2, 16}));
    CHECK(divides(mod4.kernel, mask_polynomial(d4)));
    CHECK(replay_oracle(mod4) == d4);

    // base-6 family: {0,1} + {0,12,24} with a +36 offset keeps acceptance
    ProductFormChain mod6;
    mod6.base = 6;
    mod6.stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2, 4}), 1, 0, {0, 0, 0, 0, 0, 36}}};
    const DigitSet d6 = make_modulo_product_form(mod6);
    CHECK(mod6.stages[1].modulus == 36);
    CHECK(d6 == ds({0, 1, 12, 13, 24, 61}));
    CHECK(mod6.kernel_nodes == std::vector<std::int64_t>{2, 9, 18, 36});
    CHECK(is_tile_digit_set(d6, 6).accept);
    CHECK(replay_oracle(mod6) == d6);

    // declared modulus that disagrees with the kernel spectrum
    ProductFormChain wrong;
    wrong.base = 4;
    wrong.stages = {{ds({0, 1}), 0, 2, {}}, {ds({0, 2}), 1, 8, {}}};
    CHECK_THROWS_AS(make_modulo_product_form(wrong), ModulusMismatch);

    // offsets must be multiples of the stage modulus
    ProductFormChain ragged;
    ragged.base = 4;
    ragged.stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2}), 1, 0, {0, 0, 0, 8}}};
    CHECK_THROWS_AS(make_modulo_product_form(ragged), std::invalid_argument);
}

TEST_CASE("replay_chain reproduces stored chains bit-for-bit") {
    ProductFormChain mod4;
    mod4.base = 4;
    mod4.stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2}), 1, 0, {0, 0, 0, 16}}};
    const DigitSet d4 = make_modulo_product_form(mod4);
    CHECK(replay_chain(mod4) == d4);

    // replay trusts the stored moduli and never recomputes them
    ProductFormChain moved = mod4;
    moved.stages[1].offsets = {0, 16, 0, 16};
    CHECK(replay_chain(moved) == ds({0, 8, 17, 25}));

    // a stored modulus of 1 allows arbitrary shifts; equal elements throw
    ProductFormChain collide;
    collide.base = 4;
    collide.stages = {{ds({0, 1}), 0, 1, {1, 0}}};
    CHECK_THROWS_AS(replay_chain(collide), OffsetCollision);

    ProductFormChain unset;
    unset.base = 4;
    unset.stages = {{ds({0, 1}), 0, 0, {}}};
    CHECK_THROWS_AS(replay_chain(unset), std::invalid_argument);
}

TEST_CASE("order_k_execute: one layer reduces to make_modulo_product_form") {
    ProductFormChain direct;
    direct.base = 6;
    direct.stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2, 4}), 1, 0, {0, 0, 0, 0, 0, 36}}};
    const DigitSet expect = make_modulo_product_form(direct);

    std::vector<ProductFormChain> layers(1);
    layers[0].base = 6;
    layers[0].stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2, 4}), 1, 0, {0, 0, 0, 0, 0, 36}}};
    CHECK(order_k_execute(layers) == expect);
    CHECK(layers[0].order == 1);
    CHECK(layers[0].kernel == direct.kernel);
}

TEST_CASE("order_k_execute runs the second-order rearrangement plan") {
    // Layer 0: Z_12 as {0,1} + {0,2} + {0,4,8}; layer 1 re-decomposes it,
    // lifts the middle part by offsets, and scales the third part by b.
    std::vector<ProductFormChain> layers(2);
    layers[0].base = 12;
    layers[0].stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2}), 0, 0, {}}, {ds({0, 4, 8}), 0, 0, {}}};
    layers[1].base = 12;
    layers[1].stages = {{ds({0, 1}), 0, 0, {}},
                        {ds({0, 4, 8}), 0, 0, {0, 0, 12, 12, 0, 0}},
                        {ds({0, 2}), 1, 0, {}}};

    const DigitSet d = order_k_execute(layers);
    CHECK(layers[0].resulting_set == DigitSet::range(12));
    CHECK(layers[0].kernel_nodes == std::vector<std::int64_t>{2, 3, 4, 6, 12});

    // the same set written as a strict product-form E_p + 8E_q + 24E_p
    CHECK(d == make_product_form({ds({0, 1}), ds({0, 8, 16}), ds({0, 2})}, {0, 0, 1}, 12));
    CHECK(d == ds({0, 1, 8, 9, 16, 17, 24, 25, 32, 33, 40, 41}));
    CHECK(layers[1].order == 2);
    CHECK(layers[1].kernel_nodes == std::vector<std::int64_t>{2, 3, 6, 12, 16, 48});
    CHECK(layers[1].kernel == cyclo_product({2, 3, 6, 12, 16, 48}));
    CHECK(divides(layers[1].kernel, mask_polynomial(d)));
    CHECK(is_tile_digit_set(d, 12).accept);

    // outer layer must re-decompose the inner result exactly
    std::vector<ProductFormChain> bad(2);
    bad[0] = layers[0];
    bad[0].stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2}), 0, 0, {}}, {ds({0, 4, 8}), 0, 0, {}}};
    bad[1].base = 12;
    bad[1].stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 4, 8}), 0, 0, {}}};
    CHECK_THROWS_AS(order_k_execute(bad), LayerNotAFactorization);
}

TEST_CASE("kernel_build freezes the displayed kernels") {
    // type I, b = 12: (1+x)(1+x^72)(1+x^2+x^4)
    const KernelSpec k1 = kernel_build(KernelType::I, 2, 3, 2, 1, {0, 0, 1});
    CHECK(k1.base == 12);
    CHECK(k1.polynomial == mask_polynomial(ds({0, 1})) * mask_polynomial(ds({0, 72})) *
                               mask_polynomial(ds({0, 2, 4})));
    CHECK(k1.blocking_nodes == std::vector<std::int64_t>{2, 3, 6, 16, 48, 144});
    CHECK(k1.optional_nodes.empty());
    CHECK(is_blocking(k1.blocking_nodes, 12));

    // type III, b = 12: Phi_3(x) Phi_4(x^3) Phi_2(x^3)
    const KernelSpec k3 = kernel_build(KernelType::III, 2, 3, 2, 1, {0, 0, 0});
    CHECK(k3.polynomial == cyclotomic(3) * cyclotomic(4).substituted(3) *
                               cyclotomic(2).substituted(3));
    CHECK(k3.blocking_nodes == std::vector<std::int64_t>{2, 3, 4, 6, 12});
    CHECK(k3.optional_nodes.empty());

    // alpha = 1, b = 6: Phi_2(x) Phi_9(x^4) = (1+x)(1+x^12+x^24)
    const KernelSpec kpq = kernel_build(KernelType::I, 2, 3, 1, 2, {0, 0});
    CHECK(kpq.polynomial == mask_polynomial(ds({0, 1})) * mask_polynomial(ds({0, 12, 24})));
    CHECK(kpq.blocking_nodes == std::vector<std::int64_t>{2, 9, 18, 36});

    // type II, b = 12, l = 1: full kernel (1+x)(1+x^8)(1+x^16+x^32),
    // reduced blocking swaps the optional index 24 for replacement nodes.
    const KernelSpec k2 = kernel_build(KernelType::II, 2, 3, 2, 1, {0, 0, 1}, {0, 0, 1});
    CHECK(k2.polynomial == mask_polynomial(ds({0, 1})) * mask_polynomial(ds({0, 8})) *
                               mask_polynomial(ds({0, 16, 32})));
    CHECK(k2.big_m == 0);
    CHECK(k2.k == 2);
    CHECK(k2.blocking_nodes == std::vector<std::int64_t>{2, 3, 6, 12, 16, 48});
    CHECK(k2.optional_nodes == std::vector<std::int64_t>{24});
    CHECK(is_blocking(k2.blocking_nodes, 12));

    // every kernel satisfies the counting identity and spans exponent gcd 1
    for (const KernelSpec* s : {&k1, &k3, &kpq, &k2}) {
        CHECK(s->polynomial.value_at_one() == BigInt(s->base));
        CHECK(exponent_gcd(s->polynomial) == 1);
        CHECK(s->polynomial.zero_one());
    }

    // parameter validation
    CHECK_THROWS_AS(kernel_build(KernelType::I, 2, 2, 2, 1, {0, 0, 1}), ParameterOutOfRange);
    CHECK_THROWS_AS(kernel_build(KernelType::I, 4, 3, 2, 1, {0, 0, 1}), ParameterOutOfRange);
    CHECK_THROWS_AS(kernel_build(KernelType::I, 2, 3, 0, 1, {0}), ParameterOutOfRange);
    CHECK_THROWS_AS(kernel_build(KernelType::I, 2, 3, 2, 0, {0, 0, 1}), ParameterOutOfRange);
    CHECK_THROWS_AS(kernel_build(KernelType::I, 2, 3, 2, 1, {0, 1, 1}), ParameterOutOfRange);
    CHECK_THROWS_AS(kernel_build(KernelType::I, 2, 3, 2, 1, {0, 0}), ParameterOutOfRange);
    CHECK_THROWS_AS(kernel_build(KernelType::II, 2, 3, 1, 1, {0, 0}, {0, 0}), ParameterOutOfRange);
    CHECK_THROWS_AS(kernel_build(KernelType::II, 2, 3, 2, 1, {0, 0, 1}, {0, 0, 4}),
                    ParameterOutOfRange);
    CHECK_THROWS_AS(kernel_build(KernelType::II, 2, 3, 2, 1, {0, 0, 1}, {0, 0, 3}),
                    ParameterOutOfRange); // sole l at m+2: no l <= m+1 remains
    CHECK_THROWS_AS(kernel_build(KernelType::III, 2, 3, 2, 2, {0, 0, 0}), ParameterOutOfRange);
}

TEST_CASE("canonical_digit_set matches the displayed product forms") {
    const KernelSpec k1 = kernel_build(KernelType::I, 2, 3, 2, 1, {0, 0, 1});
    CHECK(canonical_digit_set(k1) == direct_sum(ds({0, 1, 2, 3, 4, 5}), ds({0, 72})));

    const KernelSpec k1small = kernel_build(KernelType::I, 2, 3, 2, 1, {0, 0, 0});
    CHECK(canonical_digit_set(k1small) == DigitSet::range(12));

    const KernelSpec k3 = kernel_build(KernelType::III, 2, 3, 2, 1, {0, 0, 0});
    CHECK(canonical_digit_set(k3) == DigitSet::range(12));

    const KernelSpec k2 = kernel_build(KernelType::II, 2, 3, 2, 1, {0, 0, 1}, {0, 0, 1});
    CHECK(canonical_digit_set(k2) == ds({0, 1, 8, 9, 16, 17, 24, 25, 32, 33, 40, 41}));

    // chain form: kernel-factor moduli, zero offsets, mask equals the kernel
    ProductFormChain chain = canonical_chain(k2);
    CHECK(chain.base == 12);
    CHECK(chain.order == 2); // M + 2
    CHECK(mask_polynomial(chain.resulting_set) == k2.polynomial);
    CHECK(replay_chain(chain) == chain.resulting_set);
    CHECK(replay_oracle(chain) == chain.resulting_set);

    // the displayed sets are tile digit sets (phi-tree oracle)
    for (const KernelSpec* s : {&k1, &k1small, &k3, &k2})
        CHECK(is_tile_digit_set(canonical_digit_set(*s), s->base).accept);
}

TEST_CASE("classify: prime-power, pq, and p^2 q frozen examples") {
    // prime power
    const Classification cp = classify(ds({0, 1, 8, 9}), 4);
    CHECK(cp.shape == BaseShape::PrimePower);
    CHECK(cp.accepted);
    CHECK(cp.prime_power.prime == 2);
    CHECK(cp.prime_power.exponents == prime_power_chain(ds({0, 1, 8, 9})).exponents);
    CHECK(cp.order == 1);

    // pq: {0,1} + 12{0,1,2} over b = 6, spectrum {2, 9}
    const Classification cpq = classify(ds({0, 1, 12, 13, 24, 25}), 6);
    CHECK(cpq.shape == BaseShape::PQ);
    CHECK(cpq.accepted);
    CHECK(cpq.spectrum == std::vector<std::int64_t>{2, 9});
    CHECK(cpq.kernel.type == KernelType::I);
    CHECK(cpq.kernel.p == 2);
    CHECK(cpq.kernel.q == 3);
    CHECK(cpq.kernel.n == 2);
    CHECK(cpq.kernel.polynomial == cyclotomic(2) * cyclotomic(9).substituted(4));
    CHECK(cpq.order == 1);
    CHECK(replay_chain(cpq.chain) == ds({0, 1, 12, 13, 24, 25}));

    // p^2 q type II display: parameters and order M + 2 = 2 are recovered,
    // the optional index 24 divides the mask
    const DigitSet d2 = ds({0, 1, 8, 9, 16, 17, 24, 25, 32, 33, 40, 41});
    const Classification c2 = classify(d2, 12);
    CHECK(c2.shape == BaseShape::PAlphaQ);
    CHECK(c2.accepted);
    CHECK(c2.kernel.type == KernelType::II);
    CHECK(c2.kernel.p == 2);
    CHECK(c2.kernel.q == 3);
    CHECK(c2.kernel.alpha == 2);
    CHECK(c2.kernel.n == 1);
    CHECK(c2.kernel.m == std::vector<std::int64_t>{0, 0, 1});
    CHECK(c2.kernel.l == std::vector<std::int64_t>{0, 0, 1});
    CHECK(c2.order == 2);
    CHECK(c2.extra_divisors == std::vector<std::int64_t>{24});
    CHECK(replay_chain(c2.chain) == d2);

    // rejected set: spectrum too thin, witness path reported
    const Classification bad = classify(ds({0, 1, 2, 5}), 4);
    CHECK_FALSE(bad.accepted);
    CHECK(bad.spectrum == std::vector<std::int64_t>{2});
    CHECK_FALSE(bad.decision.accept);
    CHECK_FALSE(bad.decision.witness_path.empty());

    // input validation
    CHECK_THROWS_AS(classify(ds({0, 1, 2}), 4), CardinalityMismatch);
    CHECK_THROWS_AS(classify(ds({1, 2, 3, 4}), 4), NotAnchored);
    CHECK_THROWS_AS(classify(DigitSet::range(30), 30), UnsupportedBase);
    CHECK_THROWS_AS(classify(DigitSet::range(36), 36), UnsupportedBase);
}

TEST_CASE("classify: modulated chain pushes the reading to the reduced kernel") {
    // Same second-order plan as above but the lift doubles one offset; the
    // optional index 24 no longer divides, so classification lands on the
    // first-gap reading l_2 = 2 with order 1 — and still replays exactly.
    std::vector<ProductFormChain> layers(2);
    layers[0].base = 12;
    layers[0].stages = {{ds({0, 1}), 0, 0, {}}, {ds({0, 2}), 0, 0, {}}, {ds({0, 4, 8}), 0, 0, {}}};
    layers[1].base = 12;
    layers[1].stages = {{ds({0, 1}), 0, 0, {}},
                        {ds({0, 4, 8}), 0, 0, {0, 0, 12, 24, 0, 0}},
                        {ds({0, 2}), 1, 0, {}}};
    const DigitSet dmod = order_k_execute(layers);
    CHECK(dmod == ds({0, 1, 8, 9, 16, 24, 25, 29, 32, 33, 40, 53}));
    CHECK(is_tile_digit_set(dmod, 12).accept);

    const Classification c = classify(dmod, 12);
    CHECK(c.accepted);
    CHECK(c.kernel.type == KernelType::II);
    CHECK(c.kernel.m == std::vector<std::int64_t>{0, 0, 1});
    CHECK(c.kernel.l == std::vector<std::int64_t>{0, 0, 2});
    CHECK(c.order == 1);
    CHECK(c.extra_divisors.empty());
    CHECK(replay_chain(c.chain) == dmod);
}

TEST_CASE("classification round trip over constructed kernels") {
    struct Case {
        KernelType type;
        std::int64_t p, q, alpha, n;
        std::vector<std::int64_t> m;
        std::vector<std::int64_t> l;
    };
    const std::vector<Case> grid = {
        // alpha = 1 (pq bases)
        {KernelType::I, 2, 3, 1, 1, {0, 0}, {}},
        {KernelType::I, 2, 3, 1, 2, {0, 0}, {}},
        {KernelType::I, 2, 3, 1, 3, {0, 0}, {}},
        {KernelType::I, 3, 2, 1, 2, {0, 0}, {}},
        {KernelType::I, 3, 2, 1, 3, {0, 0}, {}},
        {KernelType::I, 2, 5, 1, 2, {0, 0}, {}},
        {KernelType::I, 5, 2, 1, 2, {0, 0}, {}},
        // alpha = 2, type I
        {KernelType::I, 2, 3, 2, 1, {0, 0, 0}, {}},
        {KernelType::I, 2, 3, 2, 2, {0, 0, 0}, {}},
        {KernelType::I, 2, 3, 2, 1, {0, 0, 1}, {}},
        {KernelType::I, 2, 3, 2, 2, {0, 0, 1}, {}},
        {KernelType::I, 2, 3, 2, 1, {0, 0, 2}, {}},
        {KernelType::I, 3, 2, 2, 1, {0, 0, 0}, {}},
        {KernelType::I, 3, 2, 2, 2, {0, 0, 0}, {}},
        {KernelType::I, 3, 2, 2, 1, {0, 0, 1}, {}},
        {KernelType::I, 2, 5, 2, 1, {0, 0, 0}, {}},
        {KernelType::I, 2, 5, 2, 1, {0, 0, 1}, {}},
        // alpha = 2, type II (l = n cases exercise the bridged-rung reading)
        {KernelType::II, 2, 3, 2, 1, {0, 0, 1}, {0, 0, 1}},
        {KernelType::II, 2, 3, 2, 1, {0, 0, 1}, {0, 0, 2}},
        {KernelType::II, 2, 3, 2, 2, {0, 0, 1}, {0, 0, 1}},
        {KernelType::II, 2, 3, 2, 1, {0, 0, 2}, {0, 0, 1}},
        {KernelType::II, 2, 3, 2, 1, {0, 0, 2}, {0, 0, 2}},
        {KernelType::II, 2, 3, 2, 1, {0, 0, 2}, {0, 0, 3}},
        {KernelType::II, 2, 3, 2, 2, {0, 0, 2}, {0, 0, 2}},
        {KernelType::II, 3, 2, 2, 1, {0, 0, 1}, {0, 0, 1}},
        {KernelType::II, 3, 2, 2, 1, {0, 0, 1}, {0, 0, 2}},
        {KernelType::II, 2, 5, 2, 1, {0, 0, 1}, {0, 0, 1}},
        // alpha = 2, type III (m_1 >= 1 keeps it off the type-I overlap)
        {KernelType::III, 2, 3, 2, 1, {0, 1, 0}, {}},
        {KernelType::III, 2, 3, 2, 1, {0, 1, 1}, {}},
        {KernelType::III, 2, 3, 2, 1, {0, 2, 0}, {}},
        {KernelType::III, 3, 2, 2, 1, {0, 1, 0}, {}},
        // alpha = 3
        {KernelType::I, 2, 3, 3, 1, {0, 0, 0, 0}, {}},
        {KernelType::I, 2, 3, 3, 2, {0, 0, 0, 0}, {}},
        {KernelType::I, 2, 3, 3, 1, {0, 0, 1, 0}, {}},
        {KernelType::I, 2, 3, 3, 1, {0, 0, 0, 1}, {}},
        {KernelType::I, 3, 2, 3, 1, {0, 0, 0, 0}, {}},
        {KernelType::II, 2, 3, 3, 1, {0, 0, 1, 0}, {0, 0, 1, 1}},
        {KernelType::II, 2, 3, 3, 1, {0, 0, 1, 0}, {0, 0, 2, 1}},
        {KernelType::II, 2, 3, 3, 2, {0, 0, 0, 1}, {0, 0, 1, 2}},
        {KernelType::III, 2, 3, 3, 1, {0, 1, 0, 0}, {}},
    };

    for (const Case& c : grid) {
        CAPTURE(static_cast<int>(c.type));
        CAPTURE(c.p);
        CAPTURE(c.q);
        CAPTURE(c.alpha);
        CAPTURE(c.n);
        const KernelSpec spec = (c.type == KernelType::II)
                                    ? kernel_build(c.type, c.p, c.q, c.alpha, c.n, c.m, c.l)
                                    : kernel_build(c.type, c.p, c.q, c.alpha, c.n, c.m);
        const DigitSet d = canonical_digit_set(spec);
        const Classification out = classify(d, spec.base);
        CHECK(out.accepted);
        CHECK(out.kernel.type == c.type);
        CHECK(out.kernel.alpha == c.alpha);
        CHECK(out.kernel.m == c.m);
        CHECK(out.kernel.n == c.n);
        if (c.type == KernelType::II) {
            CHECK(out.kernel.l == c.l);
            CHECK(out.order == out.kernel.big_m + 2);
        } else {
            CHECK(out.order == 1);
        }
        if (c.alpha == 1 && c.n == 1) {
            CHECK(out.kernel.p == std::min(c.p, c.q)); // Z_pq: orientation tie
        } else {
            CHECK(out.kernel.p == c.p);
            CHECK(out.kernel.q == c.q);
        }
        CHECK(replay_chain(out.chain) == d);
        CHECK(out.chain.resulting_set == d);
    }
}

TEST_CASE("classify: overlaps and modulated variants") {
    // type III with m_1 = 0 coincides with type I at n = 1 (same kernel)
    const KernelSpec k3 = kernel_build(KernelType::III, 2, 3, 2, 1, {0, 0, 1});
    const KernelSpec k1 = kernel_build(KernelType::I, 2, 3, 2, 1, {0, 0, 1});
    CHECK(k3.polynomial == k1.polynomial);
    const DigitSet d3 = canonical_digit_set(k3);
    const Classification o3 = classify(d3, 12);
    CHECK(o3.accepted);
    CHECK(o3.kernel.type == KernelType::I);
    CHECK(o3.kernel.n == 1);
    CHECK(replay_chain(o3.chain) == d3);

    // alpha = 1 type III is type I with the primes swapped
    const KernelSpec kpq3 = kernel_build(KernelType::III, 2, 3, 1, 1, {0, 1});
    const DigitSet dpq = canonical_digit_set(kpq3);
    CHECK(dpq == ds({0, 1, 2, 18, 19, 20}));
    const Classification opq = classify(dpq, 6);
    CHECK(opq.accepted);
    CHECK(opq.kernel.type == KernelType::I);
    CHECK(opq.kernel.p == 3);
    CHECK(opq.kernel.q == 2);
    CHECK(opq.kernel.n == 2);
    CHECK(replay_chain(opq.chain) == dpq);

    // second kind with l_j = n = m_j + 1: the replacement node equals the
    // ladder's top rung, so the kernel IS the first-kind kernel — classify
    // reports the simpler description
    const KernelSpec kb2 = kernel_build(KernelType::II, 2, 3, 2, 2, {0, 0, 1}, {0, 0, 2});
    const KernelSpec kb1 = kernel_build(KernelType::I, 2, 3, 2, 2, {0, 0, 1});
    CHECK(kb2.polynomial == kb1.polynomial);
    const DigitSet db = canonical_digit_set(kb2);
    CHECK(db == canonical_digit_set(kb1));
    const Classification ob = classify(db, 12);
    CHECK(ob.accepted);
    CHECK(ob.kernel.type == KernelType::I);
    CHECK(ob.kernel.n == 2);
    CHECK(ob.kernel.m == std::vector<std::int64_t>{0, 0, 1});
    CHECK(replay_chain(ob.chain) == db);

    // fully-kept factor (l_2 = m_2 + 2): the first-kind kernel divides the
    // mask, so classification lands on type I and absorbs the difference
    // into stage offsets; replay is still exact
    const KernelSpec kf = kernel_build(KernelType::II, 2, 3, 3, 1, {0, 0, 1, 0}, {0, 0, 3, 1});
    const DigitSet df = canonical_digit_set(kf);
    const Classification of = classify(df, 24);
    CHECK(of.accepted);
    CHECK(of.kernel.type == KernelType::I);
    CHECK(of.kernel.m == std::vector<std::int64_t>{0, 0, 1, 0});
    CHECK(of.kernel.n == 1);
    CHECK(replay_chain(of.chain) == df);

    // bridged rung at i = n: l_3 = 2 and l_3 = 1 give the same kernel (the
    // q-power path absorbs the ladder's extra rung); classify reports the
    // smaller l
    const KernelSpec kc2 = kernel_build(KernelType::II, 2, 3, 3, 1, {0, 0, 1, 1}, {0, 0, 1, 2});
    const KernelSpec kc1 = kernel_build(KernelType::II, 2, 3, 3, 1, {0, 0, 1, 1}, {0, 0, 1, 1});
    CHECK(kc2.polynomial == kc1.polynomial);
    const DigitSet dc = canonical_digit_set(kc2);
    CHECK(dc == canonical_digit_set(kc1));
    const Classification oc = classify(dc, 24);
    CHECK(oc.accepted);
    CHECK(oc.kernel.type == KernelType::II);
    CHECK(oc.kernel.l == std::vector<std::int64_t>{0, 0, 1, 1});
    CHECK(replay_chain(oc.chain) == dc);

    // offset-modulated canonical chains classify and replay to the input
    const std::vector<KernelSpec> specs = {
        kernel_build(KernelType::I, 2, 3, 2, 1, {0, 0, 1}),
        kernel_build(KernelType::I, 2, 3, 1, 2, {0, 0}),
        kernel_build(KernelType::II, 2, 3, 2, 1, {0, 0, 2}, {0, 0, 1}),
        kernel_build(KernelType::III, 2, 3, 2, 1, {0, 1, 0}),
    };
    for (const KernelSpec& s : specs) {
        ProductFormChain chain = canonical_chain(s);
        auto& top = chain.stages.back();
        const std::size_t card = static_cast<std::size_t>(chain.resulting_set.cardinality());
        top.offsets.assign(card, 0);
        top.offsets.back() = top.modulus;
        const DigitSet dm = replay_chain(chain);
        CHECK(dm.cardinality() == card);
        const Classification om = classify(dm, s.base);
        CHECK(om.accepted);
        CHECK(replay_chain(om.chain) == dm);
        CHECK(is_tile_digit_set(dm, s.base).accept);
    }
}

TEST_CASE("constructed forms are integer tiles") {
    const std::vector<DigitSet> sets = {
        make_product_form({ds({0, 1}), ds({0, 2})}, {0, 1}, 4),
        ds({0, 1, 8, 25}),
        ds({0, 1, 12, 13, 24, 61}),
        canonical_digit_set(kernel_build(KernelType::II, 2, 3, 2, 1, {0, 0, 1}, {0, 0, 1})),
        canonical_digit_set(kernel_build(KernelType::III, 2, 3, 2, 1, {0, 1, 0})),
    };
    for (const DigitSet& d : sets) {
        CAPTURE(d.str());
        CHECK(is_integer_tile(d).verdict == TileVerdict::Yes);
    }
}

TEST_CASE("rearrangement identity E_p + pE_q = qE_p + E_q") {
    const std::vector<std::int64_t> primes = {2, 3, 5, 7};
    for (std::int64_t p : primes) {
        for (std::int64_t q : primes) {
            if (p == q) continue;
            const DigitSet lhs = direct_sum(DigitSet::range(p), DigitSet::range(q).scaled(p));
            const DigitSet rhs = direct_sum(DigitSet::range(p).scaled(q), DigitSet::range(q));
            CHECK(lhs == rhs);
            CHECK(lhs == DigitSet::range(p * q));
        }
    }
    // cyclotomic form used by the second-order rewrite, t = 1, 2
    for (std::int64_t t : {1, 2}) {
        const std::int64_t p = 2, q = 3;
        const std::int64_t p2t = ipow(p, 2 * t);
        const IntPoly lhs = cyclotomic(p) * cyclotomic(p2t) * cyclotomic(q).substituted(p2t);
        const IntPoly rhs = cyclotomic(p) * cyclotomic(p2t).substituted(q) *
                            cyclotomic(q).substituted(p2t / p);
        CHECK(lhs == rhs);
    }
}
