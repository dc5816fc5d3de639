#include "tilekit/cyclotomic.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace tilekit {

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be positive");
    std::vector<std::pair<std::int64_t, int>> f;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) n /= p, ++e;
        f.emplace_back(p, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

std::vector<std::int64_t> prime_divisors(std::int64_t n) {
    std::vector<std::int64_t> ps;
    for (const auto& pe : factorize(n)) ps.push_back(pe.first);
    return ps;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("divisors: n must be positive");
    std::vector<std::int64_t> small, large;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        small.push_back(d);
        if (d != n / d) large.push_back(n / d);
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

std::int64_t euler_phi(std::int64_t n) {
    std::int64_t r = n;
    for (const auto& pe : factorize(n)) r -= r / pe.first;
    return r;
}

std::int64_t radical(std::int64_t n) {
    std::int64_t r = 1;
    for (const auto& pe : factorize(n)) r *= pe.first;
    return r;
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

bool is_prime_power(std::int64_t n, std::int64_t* base) {
    auto f = factorize(n);
    if (f.size() != 1) return false;
    if (base) *base = f[0].first;
    return true;
}

namespace {

// Phi_d for squarefree d: divide x^d - 1 by Phi_e over all proper divisors e.
IntPoly cyclotomic_squarefree(std::int64_t d) {
    IntPoly num = IntPoly::cyclic(d);
    for (std::int64_t e : divisors(d)) {
        if (e == d) continue;
        auto [q, r] = poly_divrem(num, cyclotomic(e));
        num = std::move(q);
    }
    return num;
}

IntPoly compute_cyclotomic(std::int64_t d) {
    if (d == 1) return IntPoly::cyclic(1); // x - 1
    if (is_prime(d)) {
        std::vector<BigInt> c(static_cast<std::size_t>(d));
        std::fill(c.begin(), c.end(), BigInt(1));
        return IntPoly(std::move(c));
    }
    const std::int64_t rad = radical(d);
    if (rad != d) return cyclotomic(rad).substituted(d / rad);
    return cyclotomic_squarefree(d);
}

} // namespace

const IntPoly& cyclotomic(std::int64_t d) {
    if (d < 1) throw std::invalid_argument("cyclotomic: d must be positive");
    static std::map<std::int64_t, IntPoly> memo;
    static std::shared_mutex mutex;
    {
        std::shared_lock lock(mutex);
        auto it = memo.find(d);
        if (it != memo.end()) return it->second;
    }
    IntPoly value = compute_cyclotomic(d); // recursion happens unlocked
    std::unique_lock lock(mutex);
    return memo.emplace(d, std::move(value)).first->second;
}

BigInt cyclo_at_one(std::int64_t d, bool allow_index_one) {
    if (d < 1) throw std::invalid_argument("cyclo_at_one: d must be positive");
    if (d == 1) {
        if (!allow_index_one) throw IndexOne("cyclo_at_one(1) needs the explicit flag");
        return 0;
    }
    auto f = factorize(d);
    return f.size() == 1 ? BigInt(f[0].first) : BigInt(1);
}

std::vector<std::int64_t> expand_substitution(std::int64_t d, std::int64_t t) {
    if (d < 1 || t < 1) throw std::invalid_argument("expand_substitution: positive arguments required");
    // prime factors of t with multiplicity, those dividing d first
    std::vector<std::int64_t> primes;
    for (const auto& [p, e] : factorize(t))
        for (int i = 0; i < e; ++i) primes.push_back(p);
    std::stable_sort(primes.begin(), primes.end(), [d](std::int64_t a, std::int64_t b) {
        return (d % a == 0) > (d % b == 0);
    });

    std::vector<std::int64_t> s{d};
    for (std::int64_t p : primes) {
        std::vector<std::int64_t> next;
        next.reserve(2 * s.size());
        for (std::int64_t e : s) {
            if (e % p != 0) next.push_back(e);
            next.push_back(e * p);
        }
        s = std::move(next);
    }
    std::sort(s.begin(), s.end());
    // the one-prime step never repeats an index; keep that certified
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw std::logic_error("expand_substitution produced a repeated index");
    return s;
}

} // namespace tilekit
