#include "tilekit/productform.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "tilekit/cyclotomic.hpp"
#include "tilekit/errors.hpp"
#include "tilekit/spectra.hpp"

namespace tilekit {

namespace {

std::int64_t mul_ck(std::int64_t a, std::int64_t b) {
    if (a < 1 || b < 1) throw std::invalid_argument("product expects positive factors");
    if (a > std::numeric_limits<std::int64_t>::max() / b)
        throw std::overflow_error("product " + std::to_string(a) + "*" + std::to_string(b) +
                                  " overflows");
    return a * b;
}

std::int64_t pow_ck(std::int64_t base, std::int64_t exp) {
    if (base < 1 || exp < 0) throw std::invalid_argument("power expects base >= 1, exp >= 0");
    std::int64_t r = 1;
    for (std::int64_t i = 0; i < exp; ++i) r = mul_ck(r, base);
    return r;
}

std::int64_t lcm_ck(std::int64_t a, std::int64_t b) {
    return mul_ck(a / std::gcd(a, b), b);
}

// Shifts the raw running sum by per-element offsets. Offsets are indexed by
// the raw elements in ascending order; each must be a multiple of n and keep
// its element non-negative. Elements may share residues mod n, but the
// shifted elements must stay pairwise distinct (OffsetCollision).
DigitSet offset_apply(const DigitSet& raw, std::int64_t n,
                      const std::vector<std::int64_t>& offsets, std::size_t stage) {
    if (n < 1) throw std::invalid_argument("stage " + std::to_string(stage) + ": modulus must be positive");
    if (offsets.empty()) return raw;
    const auto& elems = raw.elements();
    if (offsets.size() != elems.size())
        throw std::invalid_argument("stage " + std::to_string(stage) + ": " +
                                    std::to_string(offsets.size()) + " offsets for " +
                                    std::to_string(elems.size()) + " elements");
    std::vector<std::int64_t> shifted(elems);
    for (std::size_t j = 0; j < elems.size(); ++j) {
        if (offsets[j] % n != 0)
            throw std::invalid_argument("stage " + std::to_string(stage) + ": offset " +
                                        std::to_string(offsets[j]) + " is not a multiple of " +
                                        std::to_string(n));
        shifted[j] += offsets[j];
        if (shifted[j] < 0)
            throw std::invalid_argument("stage " + std::to_string(stage) +
                                        ": offset drives an element negative");
    }
    std::vector<std::int64_t> probe(shifted);
    std::sort(probe.begin(), probe.end());
    if (std::adjacent_find(probe.begin(), probe.end()) != probe.end())
        throw OffsetCollision("stage " + std::to_string(stage) +
                              ": offsets leave two elements equal");
    return DigitSet(std::move(shifted));
}

void validate_exponents(const ProductFormChain& chain) {
    if (chain.base < 2) throw std::invalid_argument("base must be at least 2");
    if (chain.stages.empty()) throw std::invalid_argument("chain has no stages");
    if (chain.stages.front().exponent != 0)
        throw std::invalid_argument("the first stage must carry exponent 0");
    for (std::size_t i = 1; i < chain.stages.size(); ++i)
        if (chain.stages[i].exponent < chain.stages[i - 1].exponent)
            throw std::invalid_argument("stage exponents must be non-decreasing");
}

// Runs one chain in place: checks the unscaled parts direct-sum to a complete
// residue system mod b (or exactly to `target` for an outer layer), recomputes
// each modulus as the lcm of the running kernel's cyclotomic indices — the
// kernel collects, per stage, the candidate indices whose cyclotomic divides
// the part's mask, substituted at the stage scale — applies offsets, and
// requires the running kernel to divide the running mask at every stage.
void run_layer(ProductFormChain& chain, const std::vector<std::int64_t>& candidates,
               const DigitSet* target) {
    validate_exponents(chain);
    const std::int64_t b = chain.base;

    DigitSet total = chain.stages.front().part;
    try {
        for (std::size_t i = 1; i < chain.stages.size(); ++i)
            total = direct_sum(total, chain.stages[i].part);
    } catch (const CollisionInSum& e) {
        if (target) throw LayerNotAFactorization(std::string("layer parts collide: ") + e.what());
        throw;
    }
    if (target) {
        if (!(total == *target))
            throw LayerNotAFactorization("layer parts sum to " + total.str() +
                                         ", not the previous layer's " + target->str());
    } else {
        if (total.cardinality() != static_cast<std::size_t>(b))
            throw NotAFactorization("parts sum to " + std::to_string(total.cardinality()) +
                                    " elements, want " + std::to_string(b));
        std::vector<char> seen(static_cast<std::size_t>(b), 0);
        for (std::int64_t e : total.elements()) {
            auto& hit = seen[static_cast<std::size_t>(e % b)];
            if (hit)
                throw NotAFactorization("parts do not fill the residues mod " + std::to_string(b));
            hit = 1;
        }
    }

    IntPoly kernel = IntPoly::constant(1);
    std::vector<std::int64_t> nodes;
    DigitSet cur;
    for (std::size_t i = 0; i < chain.stages.size(); ++i) {
        ProductFormStage& st = chain.stages[i];
        const std::int64_t scale = pow_ck(b, st.exponent);
        const IntPoly part_mask = mask_polynomial(st.part);
        for (std::int64_t s : candidates) {
            if (!divides(cyclotomic(s), part_mask)) continue;
            kernel = kernel * cyclotomic(s).substituted(scale);
            for (std::int64_t t : expand_substitution(s, scale)) nodes.push_back(t);
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        std::int64_t n_i = 1;
        for (std::int64_t t : nodes) n_i = lcm_ck(n_i, t);
        if (st.modulus != 0 && st.modulus != n_i)
            throw ModulusMismatch("stage " + std::to_string(i) + " declares modulus " +
                                  std::to_string(st.modulus) + " but the kernel forces " +
                                  std::to_string(n_i));
        st.modulus = n_i;
        const DigitSet raw = i == 0 ? st.part : direct_sum(cur, st.part.scaled(scale));
        cur = offset_apply(raw, n_i, st.offsets, i);
        if (!divides(kernel, mask_polynomial(cur)))
            throw KernelDivisionFailed("stage " + std::to_string(i) +
                                       ": running kernel does not divide the mask");
    }
    chain.kernel = kernel;
    chain.kernel_nodes = std::move(nodes);
    chain.resulting_set = cur;
}

} // namespace

DigitSet make_product_form(const std::vector<DigitSet>& parts,
                           const std::vector<std::int64_t>& l_exps, std::int64_t b) {
    if (b < 2) throw std::invalid_argument("base must be at least 2");
    if (parts.empty() || parts.size() != l_exps.size())
        throw std::invalid_argument("need one exponent per part");
    if (l_exps.front() != 0) throw std::invalid_argument("the first exponent must be 0");
    for (std::size_t i = 1; i < l_exps.size(); ++i)
        if (l_exps[i] < l_exps[i - 1])
            throw std::invalid_argument("exponents must be non-decreasing");

    DigitSet total = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) total = direct_sum(total, parts[i]);
    if (total.cardinality() != static_cast<std::size_t>(b))
        throw NotAFactorization("parts sum to " + std::to_string(total.cardinality()) +
                                " elements, want " + std::to_string(b));
    std::vector<char> seen(static_cast<std::size_t>(b), 0);
    for (std::int64_t e : total.elements()) {
        auto& hit = seen[static_cast<std::size_t>(e % b)];
        if (hit) throw NotAFactorization("parts do not fill the residues mod " + std::to_string(b));
        hit = 1;
    }

    DigitSet d = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i)
        d = direct_sum(d, parts[i].scaled(pow_ck(b, l_exps[i])));
    return d;
}

DigitSet make_modulo_product_form(ProductFormChain& chain) {
    if (chain.base < 2) throw std::invalid_argument("base must be at least 2");
    std::vector<std::int64_t> candidates = divisors(chain.base);
    candidates.erase(candidates.begin()); // drop 1
    run_layer(chain, candidates, nullptr);
    chain.order = 1;
    return chain.resulting_set;
}

DigitSet replay_chain(const ProductFormChain& chain) {
    validate_exponents(chain);
    DigitSet cur;
    for (std::size_t i = 0; i < chain.stages.size(); ++i) {
        const ProductFormStage& st = chain.stages[i];
        if (st.modulus < 1)
            throw std::invalid_argument("stage " + std::to_string(i) +
                                        ": replay requires a stored modulus");
        const DigitSet raw =
            i == 0 ? st.part : direct_sum(cur, st.part.scaled(pow_ck(chain.base, st.exponent)));
        cur = offset_apply(raw, st.modulus, st.offsets, i);
    }
    return cur;
}

DigitSet order_k_execute(std::vector<ProductFormChain>& layers) {
    if (layers.empty()) throw std::invalid_argument("no layers");
    make_modulo_product_form(layers.front());
    for (std::size_t t = 1; t < layers.size(); ++t) {
        if (layers[t].base != layers.front().base)
            throw std::invalid_argument("layers disagree on the base");
        run_layer(layers[t], layers[t - 1].kernel_nodes, &layers[t - 1].resulting_set);
        layers[t].order = static_cast<std::int64_t>(t) + 1;
    }
    return layers.back().resulting_set;
}

namespace {

struct KernelFactor {
    std::int64_t d = 1; // prime-power cyclotomic index
    std::int64_t s = 1; // substitution x -> x^s
};

struct StagePlan {
    DigitSet part;           // already carries its inner scale
    std::int64_t exponent = 0; // power of b applied on top
    KernelFactor factor;     // the stage's kernel factor Phi_d(x^s)
};

IntPoly factor_poly(const KernelFactor& f) { return cyclotomic(f.d).substituted(f.s); }

// The displayed stages of a kernel, sorted so the powers of b are
// non-decreasing (ties by the factor's full period d*s, so the widest factor
// peels first). Each stage's scaled mask is checked against its factor.
std::vector<StagePlan> stage_plans(const KernelSpec& spec) {
    const std::int64_t p = spec.p, q = spec.q, a = spec.alpha, n = spec.n;
    const DigitSet ep = DigitSet::range(p);
    const DigitSet eq = DigitSet::range(q);
    std::vector<StagePlan> plans;
    switch (spec.type) {
    case KernelType::I:
        plans.push_back({ep, 0, {p, 1}});
        plans.push_back({eq.scaled(p), n - 1,
                         {pow_ck(q, n), pow_ck(p, a * (n - 1) + 1)}});
        for (std::int64_t j = 2; j <= a; ++j)
            plans.push_back({ep.scaled(mul_ck(pow_ck(p, j - 1), q)), spec.m[j],
                             {pow_ck(p, spec.m[j] * a + j), pow_ck(q, spec.m[j] + 1)}});
        break;
    case KernelType::II:
        plans.push_back({ep, 0, {p, 1}});
        plans.push_back({eq.scaled(pow_ck(p, a * (spec.big_m + 1) + spec.k)), n - 1,
                         {pow_ck(q, n), pow_ck(p, a * (n + spec.big_m) + spec.k)}});
        for (std::int64_t j = 2; j <= a; ++j) {
            // l_j = m_j + 2 keeps the whole factor; b^{l_j-1} p^{(m_j-l_j+1)a+j-1}
            // = b^{m_j} p^{j-1} q as scalars, so emit the first-kind stage shape.
            if (spec.l[j] == spec.m[j] + 2)
                plans.push_back({ep.scaled(mul_ck(pow_ck(p, j - 1), q)), spec.m[j],
                                 {pow_ck(p, spec.m[j] * a + j), pow_ck(q, spec.m[j] + 1)}});
            else
                plans.push_back(
                    {ep.scaled(pow_ck(p, (spec.m[j] - spec.l[j] + 1) * a + j - 1)), spec.l[j] - 1,
                     {pow_ck(p, spec.m[j] * a + j), pow_ck(q, spec.l[j] - 1)}});
        }
        break;
    case KernelType::III:
        plans.push_back({eq, 0, {q, 1}});
        for (std::int64_t j = 1; j <= a; ++j)
            plans.push_back({ep.scaled(mul_ck(pow_ck(p, j - 1), q)), spec.m[j],
                             {pow_ck(p, spec.m[j] * a + j), pow_ck(q, spec.m[j] + 1)}});
        break;
    }
    std::sort(plans.begin(), plans.end(), [](const StagePlan& x, const StagePlan& y) {
        const std::int64_t dx = x.factor.d * x.factor.s, dy = y.factor.d * y.factor.s;
        return x.exponent != y.exponent ? x.exponent < y.exponent : dx < dy;
    });
    for (const StagePlan& pl : plans)
        if (!(mask_polynomial(pl.part).substituted(pow_ck(spec.base, pl.exponent)) ==
              factor_poly(pl.factor)))
            throw std::logic_error("stage mask does not match its kernel factor");
    return plans;
}

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

KernelSpec kernel_build(KernelType type, std::int64_t p, std::int64_t q, std::int64_t alpha,
                        std::int64_t n, std::vector<std::int64_t> m,
                        std::vector<std::int64_t> l) {
    const auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ParameterOutOfRange(msg);
    };
    require(is_prime(p), "p = " + std::to_string(p) + " is not prime");
    require(is_prime(q), "q = " + std::to_string(q) + " is not prime");
    require(p != q, "p and q must be distinct");
    require(alpha >= 1, "alpha must be at least 1");
    require(m.size() == static_cast<std::size_t>(alpha) + 1,
            "m must carry alpha + 1 slots (slot 0 unused)");
    m[0] = 0;
    for (std::int64_t j = 1; j <= alpha; ++j)
        require(m[static_cast<std::size_t>(j)] >= 0, "m[j] must be non-negative");

    KernelSpec spec;
    spec.type = type;
    spec.p = p;
    spec.q = q;
    spec.alpha = alpha;
    spec.n = n;
    spec.base = mul_ck(pow_ck(p, alpha), q);

    switch (type) {
    case KernelType::I:
        require(n >= 1, "type I needs n >= 1");
        require(m[1] == 0, "type I needs m[1] = 0");
        require(l.empty(), "type I takes no l parameters");
        break;
    case KernelType::II: {
        require(alpha >= 2, "type II needs alpha >= 2");
        require(n >= 1, "type II needs n >= 1");
        require(m[1] == 0, "type II needs m[1] = 0");
        require(l.size() == static_cast<std::size_t>(alpha) + 1,
                "l must carry alpha + 1 slots (slots 0 and 1 unused)");
        l[0] = l[1] = 0;
        bool some = false;
        for (std::int64_t j = 2; j <= alpha; ++j) {
            const std::int64_t lj = l[static_cast<std::size_t>(j)];
            const std::int64_t mj = m[static_cast<std::size_t>(j)];
            require(1 <= lj && lj <= mj + 2, "l[j] must lie in [1, m[j] + 2]");
            if (lj <= mj + 1) some = true;
        }
        require(some, "at least one l[j] must be <= m[j] + 1");
        spec.big_m = std::numeric_limits<std::int64_t>::min();
        for (std::int64_t j = 2; j <= alpha; ++j) {
            const std::int64_t gap = m[static_cast<std::size_t>(j)] - l[static_cast<std::size_t>(j)];
            if (gap > spec.big_m || (gap == spec.big_m && j > spec.k)) {
                if (gap > spec.big_m) spec.big_m = gap;
                spec.k = j;
            }
        }
        break;
    }
    case KernelType::III:
        require(n == 1, "type III fixes the q-exponent at 1");
        require(l.empty(), "type III takes no l parameters");
        break;
    }
    spec.m = std::move(m);
    spec.l = std::move(l);

    const std::vector<StagePlan> plans = stage_plans(spec);
    IntPoly poly = IntPoly::constant(1);
    std::vector<std::int64_t> all;
    for (const StagePlan& pl : plans) {
        poly = poly * factor_poly(pl.factor);
        for (std::int64_t s : expand_substitution(pl.factor.d, pl.factor.s)) all.push_back(s);
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw ParameterOutOfRange("kernel factors share a cyclotomic index");
    spec.polynomial = poly;

    if (type == KernelType::II) {
        std::vector<std::int64_t> blocking{p};
        for (std::int64_t s : expand_substitution(pow_ck(q, n), pow_ck(p, alpha * (n - 1) + 1)))
            blocking.push_back(s);
        for (std::int64_t j = 2; j <= alpha; ++j) {
            const std::int64_t mj = spec.m[static_cast<std::size_t>(j)];
            const std::int64_t lj = spec.l[static_cast<std::size_t>(j)];
            for (std::int64_t s :
                 expand_substitution(pow_ck(p, mj * alpha + j), pow_ck(q, lj - 1)))
                blocking.push_back(s);
            for (std::int64_t i = lj; i <= mj + 1; ++i)
                blocking.push_back(
                    mul_ck(pow_ck(p, alpha * (n + mj - i) + j), pow_ck(q, n)));
        }
        std::sort(blocking.begin(), blocking.end());
        if (std::adjacent_find(blocking.begin(), blocking.end()) != blocking.end())
            throw std::logic_error("reduced kernel repeats a cyclotomic index");
        if (!std::includes(all.begin(), all.end(), blocking.begin(), blocking.end()))
            throw std::logic_error("reduced kernel is not a sub-product of the full kernel");
        std::vector<std::int64_t> optional;
        std::set_difference(all.begin(), all.end(), blocking.begin(), blocking.end(),
                            std::back_inserter(optional));
        spec.blocking_nodes = std::move(blocking);
        spec.optional_nodes = std::move(optional);
    } else {
        spec.blocking_nodes = std::move(all);
    }

    if (!is_blocking(spec.blocking_nodes, spec.base))
        throw std::logic_error("kernel nodes do not form a blocking for base " +
                               std::to_string(spec.base));
    return spec;
}

ProductFormChain canonical_chain(const KernelSpec& spec) {
    const std::vector<StagePlan> plans = stage_plans(spec);
    ProductFormChain chain;
    chain.base = spec.base;
    chain.order = spec.type == KernelType::II ? spec.big_m + 2 : 1;
    std::int64_t run = 1;
    std::vector<std::int64_t> nodes;
    DigitSet cur;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const StagePlan& pl = plans[i];
        run = lcm_ck(run, mul_ck(pl.factor.d, pl.factor.s));
        chain.stages.push_back({pl.part, pl.exponent, run, {}});
        for (std::int64_t s : expand_substitution(pl.factor.d, pl.factor.s)) nodes.push_back(s);
        cur = i == 0 ? pl.part : direct_sum(cur, pl.part.scaled(pow_ck(spec.base, pl.exponent)));
    }
    if (!(mask_polynomial(cur) == spec.polynomial))
        throw std::logic_error("displayed set's mask does not equal the kernel");
    chain.kernel = spec.polynomial;
    chain.kernel_nodes = sorted_unique(std::move(nodes));
    chain.resulting_set = cur;
    return chain;
}

DigitSet canonical_digit_set(const KernelSpec& spec) {
    return canonical_chain(spec).resulting_set;
}

namespace {

// Peels the kernel factors off the mask, top stage first: fold at the stage
// modulus (coefficients must stay 0/1), then divide exactly by the stage
// factor; the quotient's support is the previous partial sum and the final
// quotient must be 1. Replay against the input set is the end-to-end check.
std::vector<DigitSet> peel_stages(const DigitSet& d, const std::vector<StagePlan>& plans,
                                  const ProductFormChain& chain) {
    std::vector<DigitSet> sets(plans.size());
    sets.back() = d;
    IntPoly cur = mask_polynomial(d);
    for (std::size_t t = plans.size() - 1;; --t) {
        const std::int64_t n_t = chain.stages[t].modulus;
        const IntPoly folded = fold_mod_cyclic(cur, n_t);
        if (!folded.zero_one())
            throw ExtractionFailed("stage " + std::to_string(t) + ": elements collide modulo " +
                                   std::to_string(n_t));
        const auto [quot, rem] = poly_divrem(folded, factor_poly(plans[t].factor));
        if (!rem.is_zero())
            throw ExtractionFailed("stage " + std::to_string(t) + ": Phi_" +
                                   std::to_string(plans[t].factor.d) + "(x^" +
                                   std::to_string(plans[t].factor.s) +
                                   ") does not divide the folded mask");
        if (t == 0) {
            if (!(quot == IntPoly::constant(1)))
                throw ExtractionFailed("chain does not terminate: residual quotient " +
                                       quot.str());
            break;
        }
        if (!quot.zero_one())
            throw ExtractionFailed("stage " + std::to_string(t) +
                                   ": quotient coefficients leave {0,1}");
        sets[t - 1] = DigitSet(quot.support());
        cur = quot;
    }
    return sets;
}

// Matches the raw stage sums against the peeled sets residue class by residue
// class mod the stage modulus, recording the difference as the stage offsets.
void recover_offsets(ProductFormChain& chain, const std::vector<StagePlan>& plans,
                     const std::vector<DigitSet>& sets) {
    DigitSet run;
    for (std::size_t t = 0; t < plans.size(); ++t) {
        DigitSet raw;
        try {
            raw = t == 0 ? plans[t].part
                         : direct_sum(run, plans[t].part.scaled(
                                               pow_ck(chain.base, plans[t].exponent)));
        } catch (const CollisionInSum& e) {
            throw ExtractionFailed("stage " + std::to_string(t) +
                                   ": extracted parts collide: " + e.what());
        }
        const std::int64_t n_t = chain.stages[t].modulus;
        const auto& want = sets[t].elements();
        const auto& have = raw.elements();
        if (want.size() != have.size())
            throw ExtractionFailed("stage " + std::to_string(t) + ": sum has " +
                                   std::to_string(have.size()) + " elements, extracted set " +
                                   std::to_string(want.size()));
        std::vector<std::pair<std::int64_t, std::int64_t>> by_residue;
        by_residue.reserve(want.size());
        for (std::int64_t w : want) by_residue.emplace_back(w % n_t, w);
        std::sort(by_residue.begin(), by_residue.end());
        std::vector<std::int64_t> offsets(have.size());
        bool all_zero = true;
        for (std::size_t j = 0; j < have.size(); ++j) {
            const std::int64_t r = have[j] % n_t;
            const auto it = std::lower_bound(by_residue.begin(), by_residue.end(),
                                             std::make_pair(r, std::numeric_limits<std::int64_t>::min()));
            if (it == by_residue.end() || it->first != r)
                throw ExtractionFailed("stage " + std::to_string(t) +
                                       ": no element in residue class " + std::to_string(r) +
                                       " mod " + std::to_string(n_t));
            offsets[j] = it->second - have[j];
            if (offsets[j] != 0) all_zero = false;
        }
        if (!all_zero) chain.stages[t].offsets = std::move(offsets);
        run = sets[t];
    }
}

} // namespace

Classification classify(const DigitSet& d, std::int64_t b) {
    if (b < 2) throw UnsupportedBase("base must be at least 2");
    if (d.cardinality() != static_cast<std::size_t>(b))
        throw CardinalityMismatch("set has " + std::to_string(d.cardinality()) +
                                  " elements, base is " + std::to_string(b));
    if (!d.anchored()) throw NotAnchored("set must contain 0 with content gcd 1");

    Classification out;
    out.base = b;
    const auto fac = factorize(b);
    std::int64_t p = 0, q = 0, alpha = 0;
    if (fac.size() == 1) {
        out.shape = BaseShape::PrimePower;
    } else if (fac.size() == 2) {
        if (fac[0].second == 1 && fac[1].second == 1) {
            out.shape = BaseShape::PQ;
            alpha = 1;
        } else if (fac[1].second == 1) {
            out.shape = BaseShape::PAlphaQ;
            p = fac[0].first;
            alpha = fac[0].second;
            q = fac[1].first;
        } else if (fac[0].second == 1) {
            out.shape = BaseShape::PAlphaQ;
            p = fac[1].first;
            alpha = fac[1].second;
            q = fac[0].first;
        } else {
            throw UnsupportedBase("base " + std::to_string(b) +
                                  " has two primes both with exponent >= 2");
        }
    } else {
        throw UnsupportedBase("base " + std::to_string(b) + " has three or more prime factors");
    }

    out.decision = is_tile_digit_set(d, b);
    out.accepted = out.decision.accept;
    out.spectrum = check_T1(d).factors;
    if (!out.accepted) return out;

    if (out.shape == BaseShape::PrimePower) {
        out.prime_power = prime_power_chain(d);
        out.order = 1;
        return out;
    }

    // Split the prime-power spectrum between p and q.
    std::vector<std::pair<std::int64_t, std::int64_t>> powers; // (prime, exponent)
    for (std::int64_t s : out.spectrum) {
        std::int64_t r = 0;
        if (!is_prime_power(s, &r))
            throw ExtractionFailed("spectrum entry " + std::to_string(s) +
                                   " is not a prime power");
        std::int64_t e = 0;
        for (std::int64_t t = s; t > 1; t /= r) ++e;
        powers.emplace_back(r, e);
    }

    if (out.shape == BaseShape::PQ) {
        // Orient so the spectrum reads {p, q^n}; ties pick the smaller prime.
        if (powers.size() != 2 || powers[0].first == powers[1].first)
            throw ExtractionFailed("spectrum does not name both primes exactly once");
        std::sort(powers.begin(), powers.end());
        if (powers[0].second == 1) {
            p = powers[0].first;
            q = powers[1].first;
        } else if (powers[1].second == 1) {
            p = powers[1].first;
            q = powers[0].first;
        } else {
            throw ExtractionFailed("neither prime carries exponent 1 in the spectrum");
        }
    }

    std::vector<std::int64_t> m(static_cast<std::size_t>(alpha) + 1, -1);
    std::int64_t n_q = 0;
    m[0] = 0;
    for (const auto& [r, e] : powers) {
        if (r == q) {
            if (n_q != 0)
                throw ExtractionFailed("spectrum carries two powers of q = " + std::to_string(q));
            n_q = e;
        } else if (r == p) {
            std::int64_t j = e % alpha == 0 ? alpha : e % alpha;
            if (m[static_cast<std::size_t>(j)] != -1 || e < j)
                throw ExtractionFailed("p-exponents do not fill the residues mod alpha");
            m[static_cast<std::size_t>(j)] = (e - j) / alpha;
        } else {
            throw ExtractionFailed("spectrum prime " + std::to_string(r) +
                                   " divides neither p nor q");
        }
    }
    if (n_q == 0) throw ExtractionFailed("spectrum carries no power of q = " + std::to_string(q));
    for (std::int64_t j = 1; j <= alpha; ++j)
        if (m[static_cast<std::size_t>(j)] == -1)
            throw ExtractionFailed("spectrum carries no power of p in residue class " +
                                   std::to_string(j));

    const IntPoly mask = mask_polynomial(d);
    KernelSpec spec;
    if (m[1] == 0) {
        // Spectrum contains p itself: probe each p-ladder for its first gap.
        // A ladder whose rungs q^1..q^{m_j+1} all divide keeps its full
        // factor (slot m_j + 2); any gap at or below m_j + 1 forces the
        // second kind. The rung at i = n_q is inconclusive — the q-power
        // factor's expansion passes through it — so when the gap sits right
        // behind that rung both readings are tried. When every ladder runs
        // full the first-kind reading is tried first (a second-kind reading
        // with l_j = n has the identical kernel, so ties resolve to the
        // simpler description); otherwise candidates go smaller-l first.
        // A reading whose full kernel equals the mask is an offset-free
        // description and wins outright; only when none exists does the
        // first reading whose kernel divides the mask stand (the rest of
        // the mask is then absorbed by stage offsets). If none divides, the
        // literal first-gap reading stands (only the reduced kernel is
        // promised).
        std::vector<std::vector<std::int64_t>> cand(static_cast<std::size_t>(alpha) + 1);
        std::size_t combos = 1;
        bool all_full = true;
        for (std::int64_t j = 2; j <= alpha; ++j) {
            const std::int64_t mj = m[static_cast<std::size_t>(j)];
            const std::int64_t pe = pow_ck(p, mj * alpha + j);
            std::int64_t first_gap = mj + 2;
            for (std::int64_t i = 1; i <= mj + 1; ++i) {
                if (!divides(cyclotomic(mul_ck(pe, pow_ck(q, i))), mask)) {
                    first_gap = i;
                    break;
                }
            }
            auto& c = cand[static_cast<std::size_t>(j)];
            if (first_gap == n_q + 1 && n_q <= mj + 1) c.push_back(n_q);
            c.push_back(first_gap);
            if (first_gap != mj + 2) all_full = false;
            combos *= c.size();
        }
        const auto build_combo = [&](std::size_t index) {
            std::vector<std::int64_t> l(static_cast<std::size_t>(alpha) + 1, 0);
            bool second_kind = false;
            for (std::int64_t j = alpha; j >= 2; --j) {
                const auto& c = cand[static_cast<std::size_t>(j)];
                l[static_cast<std::size_t>(j)] = c[index % c.size()];
                index /= c.size();
                if (l[static_cast<std::size_t>(j)] <= m[static_cast<std::size_t>(j)] + 1)
                    second_kind = true;
            }
            return second_kind ? kernel_build(KernelType::II, p, q, alpha, n_q, m, l)
                               : kernel_build(KernelType::I, p, q, alpha, n_q, m);
        };
        std::vector<std::size_t> order;
        if (all_full) order.push_back(combos - 1);
        for (std::size_t c = 0; c + (all_full ? 1 : 0) < combos; ++c) order.push_back(c);
        bool have = false;
        for (int pass = 0; pass < 2 && !have; ++pass) {
            for (std::size_t c : order) {
                try {
                    KernelSpec candidate = build_combo(c);
                    if (pass == 0 ? candidate.polynomial == mask
                                  : divides(candidate.polynomial, mask)) {
                        spec = std::move(candidate);
                        have = true;
                        break;
                    }
                } catch (const ParameterOutOfRange&) {
                    // inconsistent reading (e.g. factors sharing an index) — skip
                }
            }
        }
        if (!have) {
            try {
                spec = build_combo(combos - 1);
            } catch (const ParameterOutOfRange& e) {
                throw ExtractionFailed(std::string("spectrum probes yield no admissible kernel: ") +
                                       e.what());
            }
        }
    } else {
        if (n_q != 1)
            throw ExtractionFailed("spectrum matches neither admissible shape: no p, q^" +
                                   std::to_string(n_q));
        spec = kernel_build(KernelType::III, p, q, alpha, 1, m);
    }

    for (std::int64_t s : spec.optional_nodes)
        if (divides(cyclotomic(s), mask)) out.extra_divisors.push_back(s);

    ProductFormChain chain = canonical_chain(spec);
    const std::vector<StagePlan> plans = stage_plans(spec);
    const std::vector<DigitSet> sets = peel_stages(d, plans, chain);
    recover_offsets(chain, plans, sets);
    chain.resulting_set = d;
    if (!(replay_chain(chain) == d))
        throw ExtractionFailed("replayed chain does not reproduce the input set");

    out.kernel = std::move(spec);
    out.order = chain.order;
    out.chain = std::move(chain);
    return out;
}

} // namespace tilekit
