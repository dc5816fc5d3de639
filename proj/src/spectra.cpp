#include "tilekit/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "tilekit/cyclotomic.hpp"

namespace tilekit {

namespace {

// Certified screen: evaluate p at the primitive s-th root of unity in
// double precision. Returns true only when the value is provably nonzero,
// i.e. its magnitude exceeds a rigorous bound on the evaluation error.
// Conversions are exact because the screen is skipped unless sum|c| fits
// well inside the 53-bit mantissa.
bool certainly_not_divisible(const IntPoly& p, std::int64_t s) {
    static const BigInt kScreenCap = BigInt(1) << 40;
    BigInt sum_abs = 0;
    std::size_t nnz = 0;
    for (const auto& c : p.coeffs()) {
        if (c == 0) continue;
        sum_abs += c < 0 ? BigInt(-c) : c;
        ++nnz;
    }
    if (sum_abs > kScreenCap) return false; // screen unavailable
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double scale = sum_abs.convert_to<double>();
    std::complex<double> val = 0;
    const double step = kTwoPi / static_cast<double>(s);
    const auto& c = p.coeffs();
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == 0) continue;
        val += c[j].convert_to<double>() *
               std::polar(1.0, step * static_cast<double>(j % static_cast<std::size_t>(s)));
    }
    // Per-term relative error is a few ulp; summation adds at most nnz
    // rounding steps over partial sums bounded by sum|c|. A 32x margin on
    // (nnz+16) ulp keeps the bound safely conservative.
    const double err = scale * std::numeric_limits<double>::epsilon() *
                       32.0 * static_cast<double>(nnz + 16);
    return std::abs(val) > err;
}

// Phi_{p^a} | r for deg r < p^a = p*m: the p coefficient slices of width
// m = p^{a-1} must be identical.
bool slices_equal(const std::vector<BigInt>& r, std::int64_t p, std::int64_t m) {
    static const BigInt kZero = 0;
    auto at = [&](std::int64_t i) -> const BigInt& {
        return i < static_cast<std::int64_t>(r.size()) ? r[static_cast<std::size_t>(i)] : kZero;
    };
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 1; j < p; ++j)
            if (at(i + j * m) != at(i)) return false;
    return true;
}

void gen_phi_bounded(const std::vector<std::int64_t>& primes, std::size_t from,
                     std::int64_t s, std::int64_t phi, std::int64_t bound,
                     std::vector<std::int64_t>& out) {
    if (s > 1) out.push_back(s);
    for (std::size_t i = from; i < primes.size(); ++i) {
        const std::int64_t p = primes[i];
        if (phi > bound / (p - 1)) break; // primes ascend: no later fit either
        std::int64_t np = phi * (p - 1), ns = s * p;
        while (true) {
            gen_phi_bounded(primes, i + 1, ns, np, bound, out);
            if (np > bound / p) break;
            np *= p;
            ns *= p;
        }
    }
}

} // namespace

std::vector<std::int64_t> phi_bounded_indices(std::int64_t bound,
                                              const std::vector<std::int64_t>& allowed_primes) {
    std::vector<std::int64_t> primes;
    if (allowed_primes.empty()) {
        for (std::int64_t p = 2; p <= bound + 1; ++p)
            if (is_prime(p)) primes.push_back(p);
    } else {
        for (std::int64_t p : allowed_primes)
            if (p - 1 <= bound) primes.push_back(p);
        std::sort(primes.begin(), primes.end());
    }
    std::vector<std::int64_t> out;
    if (bound >= 1) gen_phi_bounded(primes, 0, 1, 1, bound, out);
    std::sort(out.begin(), out.end());
    return out;
}

bool divides_cyclotomic(const IntPoly& p, std::int64_t s) {
    if (s < 2) throw std::invalid_argument("divides_cyclotomic: s must be >= 2");
    if (p.is_zero()) return true;
    if (euler_phi(s) > p.degree()) return false;
    if (certainly_not_divisible(p, s)) return false;
    IntPoly folded = fold_mod_cyclic(p, s);
    if (folded.is_zero()) return true;
    std::int64_t base = 0;
    if (is_prime_power(s, &base)) return slices_equal(folded.coeffs(), base, s / base);
    return poly_divrem(folded, cyclotomic(s)).second.is_zero();
}

Spectrum compute_spectrum(const IntPoly& p) {
    if (p.is_zero()) throw ZeroPolynomial("spectrum of the zero polynomial");
    Spectrum sp;
    for (std::int64_t s : phi_bounded_indices(p.degree()))
        if (divides_cyclotomic(p, s)) sp.full.push_back(s);
    for (std::int64_t s : sp.full) {
        std::int64_t base = 0;
        if (!is_prime_power(s, &base)) continue;
        sp.prime_power.push_back(s);
        std::int64_t a = 0;
        for (std::int64_t v = s; v > 1; v /= base) ++a;
        sp.by_prime[base].push_back(a);
    }
    return sp;
}

std::vector<std::int64_t> prime_power_spectrum(const IntPoly& p) {
    if (p.is_zero()) throw ZeroPolynomial("spectrum of the zero polynomial");
    std::vector<std::int64_t> out;
    for (std::int64_t q = 2; q <= p.degree() + 1; ++q) {
        if (!is_prime(q)) continue;
        // powers q^a while phi(q^a) = (q-1) q^{a-1} <= deg
        for (std::int64_t s = q, phi = q - 1; phi <= p.degree(); phi *= q, s *= q) {
            if (divides_cyclotomic(p, s)) out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::int64_t> smooth_spectrum(const IntPoly& p, std::int64_t b) {
    if (p.is_zero()) throw ZeroPolynomial("spectrum of the zero polynomial");
    std::vector<std::int64_t> out;
    for (std::int64_t s : phi_bounded_indices(p.degree(), prime_divisors(b)))
        if (divides_cyclotomic(p, s)) out.push_back(s);
    return out;
}

T1Result check_T1(const DigitSet& a) {
    if (a.empty()) throw std::invalid_argument("check_T1: empty digit set");
    T1Result r;
    r.cardinality = a.cardinality();
    r.factors = prime_power_spectrum(mask_polynomial(a));
    r.product = 1;
    for (std::int64_t s : r.factors) r.product *= cyclo_at_one(s);
    r.ok = (r.product == r.cardinality);
    return r;
}

T2Result check_T2(const DigitSet& a) {
    if (a.empty()) throw std::invalid_argument("check_T2: empty digit set");
    const IntPoly p = mask_polynomial(a);
    T2Result r;
    r.spectrum = prime_power_spectrum(p);

    // spectrum regrouped per prime
    std::map<std::int64_t, std::vector<std::int64_t>> by_prime;
    for (std::int64_t s : r.spectrum) {
        std::int64_t base = 0;
        is_prime_power(s, &base);
        by_prime[base].push_back(s);
    }
    std::vector<std::vector<std::int64_t>> groups;
    for (auto& [prime, powers] : by_prime) groups.push_back(powers);

    // all selections of one power from >= 2 distinct primes
    const std::size_t k = groups.size();
    std::vector<std::int64_t> pick;
    auto recurse = [&](auto&& self, std::size_t from) -> bool {
        if (pick.size() >= 2) {
            std::int64_t phi_prod = 1;
            bool phi_small = true;
            for (std::int64_t s : pick) {
                phi_prod *= euler_phi(s);
                if (phi_prod > p.degree()) {
                    phi_small = false;
                    break;
                }
            }
            __int128 wide = 1;
            for (std::int64_t s : pick) wide *= s;
            const std::int64_t prod =
                wide <= std::numeric_limits<std::int64_t>::max() ? static_cast<std::int64_t>(wide)
                                                                 : 0; // 0: not representable
            // phi(product) > deg p already rules divisibility out by degree
            if (!phi_small || !divides_cyclotomic(p, prod)) {
                r.witness = pick;
                r.witness_product = prod;
                return false;
            }
        }
        for (std::size_t g = from; g < k; ++g)
            for (std::int64_t s : groups[g]) {
                pick.push_back(s);
                if (!self(self, g + 1)) return false;
                pick.pop_back();
            }
        return true;
    };
    r.ok = recurse(recurse, 0);
    if (r.ok) {
        r.witness.clear();
        r.witness_product = 0;
    }
    return r;
}

StructureReport check_spectrum_structure(const DigitSet& d, std::int64_t b) {
    if (b < 1 || static_cast<std::int64_t>(d.cardinality()) != b)
        throw CardinalityMismatch("digit set cardinality " + std::to_string(d.cardinality()) +
                                  " differs from base " + std::to_string(b));
    const IntPoly p = mask_polynomial(d);
    Spectrum sp;
    for (std::int64_t s : prime_power_spectrum(p)) {
        std::int64_t base = 0;
        is_prime_power(s, &base);
        std::int64_t a = 0;
        for (std::int64_t v = s; v > 1; v /= base) ++a;
        sp.by_prime[base].push_back(a);
    }

    StructureReport rep;
    rep.ok = true;
    for (const auto& [prime, alpha] : factorize(b)) {
        PrimeStructure ps;
        ps.prime = prime;
        ps.alpha = alpha;
        auto it = sp.by_prime.find(prime);
        if (it != sp.by_prime.end()) ps.exponents = it->second;
        // bijective onto {0..alpha-1} mod alpha
        std::vector<int> hit(static_cast<std::size_t>(alpha), 0);
        for (std::int64_t a : ps.exponents) ++hit[static_cast<std::size_t>(a % alpha)];
        ps.complete = static_cast<int>(ps.exponents.size()) == alpha &&
                      std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; });
        rep.ok = rep.ok && ps.complete;
        rep.primes.push_back(std::move(ps));
    }
    return rep;
}

} // namespace tilekit
