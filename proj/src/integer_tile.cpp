#include "tilekit/integer_tile.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

#include "tilekit/cyclotomic.hpp"

namespace tilekit {

namespace {

// Residues of a mod n, sorted; BadPeriod when #a does not divide n or two
// elements collide.
std::vector<std::int64_t> reduced_residues(const DigitSet& a, std::int64_t n) {
    if (n <= 0) throw BadPeriod("period must be positive");
    if (a.empty()) throw BadPeriod("empty digit set has no complement");
    if (n % static_cast<std::int64_t>(a.cardinality()) != 0)
        throw BadPeriod("cardinality " + std::to_string(a.cardinality()) +
                        " does not divide period " + std::to_string(n));
    std::vector<std::int64_t> res;
    res.reserve(a.cardinality());
    for (std::int64_t e : a.elements()) res.push_back(e % n);
    std::sort(res.begin(), res.end());
    if (std::adjacent_find(res.begin(), res.end()) != res.end())
        throw BadPeriod("elements collide mod " + std::to_string(n));
    return res;
}

// Exact-cover backtracking: always covers the smallest uncovered residue r
// next, trying beta = r before the remaining candidates in ascending order.
// `a` contains 0, so beta = r is always a candidate.
bool complement_search(const std::vector<std::int64_t>& a, std::int64_t n,
                       std::vector<char>& covered, std::int64_t& covered_count,
                       std::int64_t scan_from, std::vector<std::int64_t>& b) {
    if (covered_count == n) return true;
    std::int64_t r = scan_from;
    while (covered[r]) ++r;

    std::vector<std::int64_t> cands;
    cands.reserve(a.size());
    for (std::int64_t alpha : a) {
        std::int64_t beta = (r - alpha) % n;
        if (beta < 0) beta += n;
        cands.push_back(beta);
    }
    std::sort(cands.begin(), cands.end());
    auto self = std::find(cands.begin(), cands.end(), r);
    std::rotate(cands.begin(), self, self + 1);

    for (std::int64_t beta : cands) {
        bool free = true;
        for (std::int64_t alpha : a) {
            if (covered[(alpha + beta) % n]) {
                free = false;
                break;
            }
        }
        if (!free) continue;
        for (std::int64_t alpha : a) covered[(alpha + beta) % n] = 1;
        covered_count += static_cast<std::int64_t>(a.size());
        b.push_back(beta);
        if (complement_search(a, n, covered, covered_count, r, b)) return true;
        b.pop_back();
        for (std::int64_t alpha : a) covered[(alpha + beta) % n] = 0;
        covered_count -= static_cast<std::int64_t>(a.size());
    }
    return false;
}

// When T1 and T2 hold, the complement at n = lcm(S_A) assembles directly:
// one block p^{a-1}(n/p^nu){0..p-1} per prime power p^a | n missing from
// S_A. Every Phi_s with s | n then divides P_A * P_B, which pins
// P_A * P_B = 1 + x + ... + x^{n-1} mod x^n - 1, an exact cover.
std::optional<TilingCertificate> assemble_complement(const DigitSet& a, std::int64_t n,
                                                     const std::vector<std::int64_t>& spectrum) {
    const std::vector<std::int64_t> res = reduced_residues(a, n);
    std::vector<std::int64_t> b{0};
    std::int64_t rest = n;
    for (std::int64_t p = 2; rest > 1; ++p) {
        if (rest % p != 0) continue;
        std::int64_t nu = 0, ppow = 1;
        while (rest % p == 0) {
            rest /= p;
            ++nu;
            ppow *= p;
        }
        const std::int64_t coprime = n / ppow;
        std::int64_t pa = 1;
        for (std::int64_t e = 1; e <= nu; ++e) {
            pa *= p;
            if (std::find(spectrum.begin(), spectrum.end(), pa) != spectrum.end()) continue;
            const std::int64_t step = (pa / p) * coprime;
            std::vector<std::int64_t> grown;
            grown.reserve(b.size() * static_cast<std::size_t>(p));
            for (std::int64_t v : b)
                for (std::int64_t i = 0; i < p; ++i) grown.push_back((v + i * step) % n);
            b = std::move(grown);
        }
    }
    std::vector<char> covered(static_cast<std::size_t>(n), 0);
    for (std::int64_t beta : b)
        for (std::int64_t alpha : res) {
            auto& c = covered[static_cast<std::size_t>((alpha + beta) % n)];
            if (c) return std::nullopt;
            c = 1;
        }
    if (res.size() * b.size() != static_cast<std::size_t>(n)) return std::nullopt;
    std::sort(b.begin(), b.end());
    return TilingCertificate{DigitSet(std::move(b)), n};
}

} // namespace

std::optional<TilingCertificate> find_complement(const DigitSet& a, std::int64_t n) {
    std::vector<std::int64_t> res = reduced_residues(a, n);
    // Translate so 0 is a member; the complement translates back.
    const std::int64_t shift = res.front();
    if (shift != 0)
        for (auto& v : res) v -= shift;

    std::vector<char> covered(static_cast<std::size_t>(n), 0);
    std::int64_t covered_count = 0;
    std::vector<std::int64_t> b;
    if (!complement_search(res, n, covered, covered_count, 0, b)) return std::nullopt;

    if (shift != 0)
        for (auto& v : b) v = (v - shift % n + n) % n;
    std::sort(b.begin(), b.end());
    return TilingCertificate{DigitSet(std::move(b)), n};
}

IntegerTileResult is_integer_tile(const DigitSet& a, int fallback_bound) {
    if (!a.anchored()) throw NotAnchored("is_integer_tile requires an anchored digit set");
    IntegerTileResult res;
    res.t1 = check_T1(a);
    res.t2 = check_T2(a);

    if (res.t1.ok && res.t2.ok) {
        std::int64_t period = 1;
        for (std::int64_t s : res.t1.factors) period = std::lcm(period, s);
        auto cert = assemble_complement(a, period, res.t1.factors);
        if (!cert) cert = find_complement(a, period); // assembly is exhaustive; belt and braces
        if (!cert)
            throw std::logic_error("is_integer_tile: complement guaranteed at period " +
                                   std::to_string(period) + " was not found");
        res.verdict = TileVerdict::Yes;
        res.certificate = std::move(cert);
        res.how = "conditions";
        return res;
    }
    if (!res.t1.ok) {
        res.verdict = TileVerdict::No;
        res.how = "t1";
        return res;
    }
    if (prime_divisors(static_cast<std::int64_t>(a.cardinality())).size() <= 2) {
        res.verdict = TileVerdict::No;
        res.how = "t2";
        return res;
    }
    for (int m = 1; m <= fallback_bound; ++m) {
        const std::int64_t n = static_cast<std::int64_t>(a.cardinality()) * m;
        std::optional<TilingCertificate> cert;
        try {
            cert = find_complement(a, n);
        } catch (const BadPeriod&) {
            continue; // residue collision at this period
        }
        if (cert) {
            res.verdict = TileVerdict::Yes;
            res.certificate = std::move(cert);
            res.how = "search";
            return res;
        }
    }
    res.verdict = TileVerdict::Unknown;
    res.how = "exhausted";
    return res;
}

std::vector<std::pair<std::int64_t, DigitSet>> decompose_along_prime(const DigitSet& a,
                                                                     std::int64_t p) {
    if (p < 2 || !is_prime(p)) throw std::invalid_argument("decompose_along_prime: p must be prime");
    std::vector<std::vector<std::int64_t>> classes(static_cast<std::size_t>(p));
    for (std::int64_t e : a.elements()) classes[static_cast<std::size_t>(e % p)].push_back(e);
    for (std::int64_t j = 0; j < p; ++j)
        if (classes[static_cast<std::size_t>(j)].empty())
            throw IncompleteResidues("no element with residue " + std::to_string(j) + " mod " +
                                     std::to_string(p));
    for (std::int64_t j = 0; j < p; ++j)
        if (classes[static_cast<std::size_t>(j)].size() * static_cast<std::size_t>(p) !=
            a.cardinality())
            throw UnequalClassSizes("residue classes mod " + std::to_string(p) +
                                    " have unequal sizes");

    std::vector<std::pair<std::int64_t, DigitSet>> parts;
    parts.reserve(static_cast<std::size_t>(p));
    for (std::int64_t j = 0; j < p; ++j) {
        const auto& cls = classes[static_cast<std::size_t>(j)];
        const std::int64_t aj = cls.front(); // classes inherit the set's ascending order
        std::vector<std::int64_t> part;
        part.reserve(cls.size());
        for (std::int64_t e : cls) part.push_back((e - aj) / p);
        parts.emplace_back(aj, DigitSet(std::move(part)));
    }
    return parts;
}

PrimePowerChain prime_power_chain(const DigitSet& a) {
    std::int64_t p = 0;
    const auto card = static_cast<std::int64_t>(a.cardinality());
    if (card < 2 || !is_prime_power(card, &p))
        throw NotPrimePowerCardinality("cardinality " + std::to_string(card) +
                                       " is not a prime power");
    int alpha = 0;
    for (std::int64_t c = card; c > 1; c /= p) ++alpha;

    // Prime-power cardinality decides tile-ness by the spectrum conditions
    // alone (the distinct-prime condition is vacuous), and this avoids the
    // anchoring requirement of is_integer_tile: chains are translation- and
    // content-agnostic.
    const T1Result t1 = check_T1(a);
    const T2Result t2 = check_T2(a);
    if (!t1.ok || !t2.ok) throw NotAnIntegerTile(a.str() + " is not an integer tile");

    std::vector<std::int64_t> mod; // p^{k_i}, ascending
    std::vector<std::int64_t> ks;
    for (std::int64_t s : t1.factors) {
        std::int64_t base = 0;
        if (!is_prime_power(s, &base) || base != p)
            throw std::logic_error("prime_power_chain: spectrum factor off the cardinality prime");
        std::int64_t k = 0;
        for (std::int64_t v = s; v > 1; v /= p) ++k;
        mod.push_back(s);
        ks.push_back(k);
    }
    if (static_cast<int>(mod.size()) != alpha)
        throw std::logic_error("prime_power_chain: spectrum size disagrees with cardinality");

    std::vector<DigitSet> stages(static_cast<std::size_t>(alpha) + 1);
    stages[static_cast<std::size_t>(alpha)] = a;
    IntPoly r = fold_mod_cyclic(mask_polynomial(a), mod.back());
    if (!r.zero_one()) throw ChainExtractionFailed("elements collide mod the top modulus");
    for (int i = alpha - 1; i >= 0; --i) {
        auto [q, rem] = poly_divrem(r, cyclotomic(mod[static_cast<std::size_t>(i)]));
        if (!rem.is_zero())
            throw ChainExtractionFailed("Phi_" + std::to_string(mod[static_cast<std::size_t>(i)]) +
                                        " does not divide the stage polynomial");
        if (!q.zero_one())
            throw ChainExtractionFailed("stage quotient has a coefficient outside {0,1}");
        if (i == 0) {
            if (!(q == IntPoly::constant(1)))
                throw ChainExtractionFailed("chain does not terminate at {0}");
            stages[0] = DigitSet({0});
        } else {
            // The stage is the support of the quotient itself; folding it at
            // the next modulus only feeds the next division.
            stages[static_cast<std::size_t>(i)] = DigitSet(q.support());
            r = fold_mod_cyclic(q, mod[static_cast<std::size_t>(i) - 1]);
            if (!r.zero_one())
                throw ChainExtractionFailed("stage fold has a coefficient outside {0,1}");
        }
    }
    return PrimePowerChain{p, std::move(ks), std::move(stages)};
}

std::pair<IntPoly, IntPoly> de_bruijn_decompose(const IntPoly& f, std::int64_t p_pow,
                                                std::int64_t q_pow) {
    std::int64_t p = 0, q = 0;
    if (p_pow < 2 || q_pow < 2 || !is_prime_power(p_pow, &p) || !is_prime_power(q_pow, &q) ||
        p == q)
        throw std::invalid_argument(
            "de_bruijn_decompose: moduli must be powers of two distinct primes");
    if (!f.nonnegative()) throw PreconditionViolated("f has a negative coefficient");
    const std::int64_t n = p_pow * q_pow;
    if (!divides_cyclotomic(f, n))
        throw PreconditionViolated("Phi_" + std::to_string(n) + " does not divide f");

    const IntPoly F = fold_mod_cyclic(f, n);
    const std::int64_t np = n / p, nq = n / q;

    // F(x) = y[x mod np] + z[x mod nq]: y and z are the coefficients of P
    // and Q on the coset transversals [0, n/p) and [0, n/q). Differences
    // propagate by breadth-first search; each connected component keeps one
    // free shift, fixed canonically so the smallest y in it is 0.
    std::vector<BigInt> y(static_cast<std::size_t>(np)), z(static_cast<std::size_t>(nq));
    std::vector<char> ydone(static_cast<std::size_t>(np), 0), zdone(static_cast<std::size_t>(nq), 0);
    for (std::int64_t root = 0; root < np; ++root) {
        if (ydone[static_cast<std::size_t>(root)]) continue;
        std::vector<std::int64_t> ys{root}, zs;
        ydone[static_cast<std::size_t>(root)] = 1;
        y[static_cast<std::size_t>(root)] = 0;
        std::queue<std::pair<char, std::int64_t>> bfs;
        bfs.emplace('y', root);
        while (!bfs.empty()) {
            const auto [kind, idx] = bfs.front();
            bfs.pop();
            if (kind == 'y') {
                for (std::int64_t x = idx; x < n; x += np) {
                    const std::int64_t s = x % nq;
                    if (!zdone[static_cast<std::size_t>(s)]) {
                        zdone[static_cast<std::size_t>(s)] = 1;
                        z[static_cast<std::size_t>(s)] =
                            F.coeff(x) - y[static_cast<std::size_t>(idx)];
                        zs.push_back(s);
                        bfs.emplace('z', s);
                    } else if (y[static_cast<std::size_t>(idx)] + z[static_cast<std::size_t>(s)] !=
                               F.coeff(x)) {
                        throw std::logic_error("de_bruijn_decompose: inconsistent coset system");
                    }
                }
            } else {
                for (std::int64_t x = idx; x < n; x += nq) {
                    const std::int64_t rr = x % np;
                    if (!ydone[static_cast<std::size_t>(rr)]) {
                        ydone[static_cast<std::size_t>(rr)] = 1;
                        y[static_cast<std::size_t>(rr)] =
                            F.coeff(x) - z[static_cast<std::size_t>(idx)];
                        ys.push_back(rr);
                        bfs.emplace('y', rr);
                    } else if (y[static_cast<std::size_t>(rr)] + z[static_cast<std::size_t>(idx)] !=
                               F.coeff(x)) {
                        throw std::logic_error("de_bruijn_decompose: inconsistent coset system");
                    }
                }
            }
        }
        BigInt miny = y[static_cast<std::size_t>(ys.front())];
        for (std::int64_t rr : ys) miny = std::min(miny, y[static_cast<std::size_t>(rr)]);
        for (std::int64_t rr : ys) y[static_cast<std::size_t>(rr)] -= miny;
        for (std::int64_t s : zs) z[static_cast<std::size_t>(s)] += miny;
        for (std::int64_t s : zs)
            if (z[static_cast<std::size_t>(s)] < 0)
                throw std::logic_error(
                    "de_bruijn_decompose: no non-negative solution despite divisibility");
    }

    IntPoly P{std::vector<BigInt>(y)};
    IntPoly Q{std::vector<BigInt>(z)};
    const IntPoly u = cyclotomic(p_pow).substituted(q_pow);
    const IntPoly v = cyclotomic(q_pow).substituted(p_pow);
    if (!(P * u + Q * v == F))
        throw std::logic_error("de_bruijn_decompose: decomposition failed verification");
    return {std::move(P), std::move(Q)};
}

} // namespace tilekit
