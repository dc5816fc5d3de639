#include "tilekit/tilecheck.hpp"

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>

#include "tilekit/errors.hpp"

namespace tilekit {
namespace {

std::int64_t budget_bytes() {
    if (const char* env = std::getenv("TILEKIT_BUDGET_MB")) {
        char* end = nullptr;
        const long long mb = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && mb > 0) return static_cast<std::int64_t>(mb) << 20;
    }
    return std::int64_t{256} << 20;
}

// Level sizes are capped against the budget BEFORE building, so b^k never
// needs to be materialized when it would not fit anyway.
void check_level_budget(std::int64_t level_size, std::int64_t b, std::int64_t s) {
    const std::int64_t bytes_per = 8 * s;
    const std::int64_t cap = budget_bytes() / bytes_per;
    if (level_size > cap / b)
        throw BudgetExceeded("level of " + std::to_string(level_size) + "*" + std::to_string(b) +
                             " points exceeds TILEKIT_BUDGET_MB");
}

std::vector<std::int64_t> apply_matrix(const std::vector<std::vector<std::int64_t>>& a,
                                       const std::vector<std::int64_t>& v) {
    const std::size_t s = a.size();
    std::vector<std::int64_t> out(s, 0);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) out[i] += a[i][j] * v[j];
    return out;
}

// All characteristic roots must leave the closed unit disc; screened with
// Durand-Kerner on the exact coefficients, tolerance 1e-9.
bool roots_outside_unit_disc(const std::vector<std::int64_t>& coeff) {
    const std::size_t s = coeff.size() - 1;
    std::vector<std::complex<double>> c(coeff.size());
    for (std::size_t i = 0; i < coeff.size(); ++i)
        c[i] = static_cast<double>(coeff[i]) / static_cast<double>(coeff[s]);
    std::vector<std::complex<double>> r(s);
    std::complex<double> seed(0.4, 0.9), pw(1.0, 0.0);
    for (std::size_t i = 0; i < s; ++i) r[i] = pw *= seed;
    for (int it = 0; it < 500; ++it) {
        double moved = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            std::complex<double> val(0.0, 0.0);
            for (std::size_t d = coeff.size(); d-- > 0;) val = val * r[i] + c[d];
            std::complex<double> den(1.0, 0.0);
            for (std::size_t j = 0; j < s; ++j)
                if (j != i) den *= r[i] - r[j];
            const std::complex<double> step = val / den;
            r[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-12) break;
    }
    for (const auto& root : r)
        if (std::abs(root) < 1.0 + 1e-9) return false;
    return true;
}

} // namespace

std::int64_t matrix_determinant(const std::vector<std::vector<std::int64_t>>& a) {
    // Bareiss fraction-free elimination: every division below is exact.
    const std::size_t s = a.size();
    std::vector<std::vector<std::int64_t>> w = a;
    std::int64_t sign = 1, prev = 1;
    for (std::size_t col = 0; col < s; ++col) {
        std::size_t piv = col;
        while (piv < s && w[piv][col] == 0) ++piv;
        if (piv == s) return 0;
        if (piv != col) {
            std::swap(w[piv], w[col]);
            sign = -sign;
        }
        for (std::size_t i = col + 1; i < s; ++i)
            for (std::size_t j = col + 1; j < s; ++j)
                w[i][j] = (w[i][j] * w[col][col] - w[i][col] * w[col][j]) / prev;
        prev = w[col][col];
    }
    return sign * w[s - 1][s - 1];
}

std::vector<std::int64_t> characteristic_polynomial(
    const std::vector<std::vector<std::int64_t>>& a) {
    // Faddeev-LeVerrier: c_{s-k} = -tr(A M_k)/k with integer M_k throughout.
    const std::size_t s = a.size();
    std::vector<std::int64_t> c(s + 1, 0);
    c[s] = 1;
    std::vector<std::vector<std::int64_t>> m(s, std::vector<std::int64_t>(s, 0));
    for (std::size_t i = 0; i < s; ++i) m[i][i] = 1;
    for (std::size_t k = 1; k <= s; ++k) {
        std::vector<std::vector<std::int64_t>> am(s, std::vector<std::int64_t>(s, 0));
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t l = 0; l < s; ++l)
                for (std::size_t j = 0; j < s; ++j) am[i][j] += a[i][l] * m[l][j];
        std::int64_t tr = 0;
        for (std::size_t i = 0; i < s; ++i) tr += am[i][i];
        c[s - k] = -tr / static_cast<std::int64_t>(k);
        m = am;
        for (std::size_t i = 0; i < s; ++i) m[i][i] += c[s - k];
    }
    return c;
}

DigitSystem scalar_system(std::int64_t b, const DigitSet& d) {
    if (b < 2) throw NotExpanding("scalar base must be >= 2, got " + std::to_string(b));
    if (static_cast<std::int64_t>(d.cardinality()) != b)
        throw CardinalityMismatch("digit count " + std::to_string(d.cardinality()) +
                                  " does not match base " + std::to_string(b));
    DigitSystem sys;
    sys.dimension = 1;
    sys.expansion = {{b}};
    sys.base = b;
    for (std::int64_t e : d.elements()) sys.digits.push_back({e});
    return sys;
}

DigitSystem matrix_system(std::vector<std::vector<std::int64_t>> a,
                          std::vector<std::vector<std::int64_t>> digits, bool assume_expanding) {
    const std::size_t s = a.size();
    if (s == 0) throw std::invalid_argument("matrix_system expects a nonempty matrix");
    for (const auto& row : a)
        if (row.size() != s) throw std::invalid_argument("expansion matrix must be square");
    for (const auto& d : digits)
        if (d.size() != s)
            throw std::invalid_argument("digit vectors must have the matrix dimension");
    const std::int64_t det = matrix_determinant(a);
    const std::int64_t b = det < 0 ? -det : det;
    if (b < 2) throw NotExpanding("|det A| = " + std::to_string(b) + " < 2");
    if (static_cast<std::int64_t>(digits.size()) != b)
        throw CardinalityMismatch("digit count " + std::to_string(digits.size()) +
                                  " does not match |det A| = " + std::to_string(b));
    {
        auto sorted = digits;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw CardinalityMismatch("digit vectors are not distinct");
    }
    if (!assume_expanding && s > 1 && !roots_outside_unit_disc(characteristic_polynomial(a)))
        throw NotExpanding("an eigenvalue modulus does not exceed 1");
    DigitSystem sys;
    sys.dimension = static_cast<std::int64_t>(s);
    sys.expansion = std::move(a);
    sys.digits = std::move(digits);
    sys.base = b;
    return sys;
}

namespace {

// D_k = D + A D_{k-1}; one-dimensional systems run on a flat buffer.
std::vector<std::int64_t> scalar_level_up(const std::vector<std::int64_t>& cur,
                                          const std::vector<std::int64_t>& digits,
                                          std::int64_t b) {
    check_level_budget(static_cast<std::int64_t>(cur.size()), b, 1);
    std::vector<std::int64_t> next;
    next.reserve(cur.size() * digits.size());
    for (std::int64_t v : cur)
        for (std::int64_t d : digits) next.push_back(d + b * v);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return next;
}

std::vector<std::vector<std::int64_t>> vector_level_up(
    const std::vector<std::vector<std::int64_t>>& cur, const DigitSystem& sys) {
    check_level_budget(static_cast<std::int64_t>(cur.size()), sys.base, sys.dimension);
    std::vector<std::vector<std::int64_t>> next;
    next.reserve(cur.size() * sys.digits.size());
    for (const auto& v : cur) {
        const std::vector<std::int64_t> av = apply_matrix(sys.expansion, v);
        for (const auto& d : sys.digits) {
            std::vector<std::int64_t> point(av);
            for (std::size_t i = 0; i < point.size(); ++i) point[i] += d[i];
            next.push_back(std::move(point));
        }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return next;
}

std::vector<std::int64_t> scalar_digits(const DigitSystem& sys) {
    std::vector<std::int64_t> d;
    for (const auto& v : sys.digits) d.push_back(v[0]);
    return d;
}

// Levels below the failing one are collision-free, so every value there
// has a unique index sequence; rebuilding with provenance finds the first
// level-k collision deterministically (sequences ordered value-major).
void reconstruct_collision(const DigitSystem& sys, std::int64_t k, CountReport& report) {
    using Point = std::vector<std::int64_t>;
    std::map<Point, std::vector<std::size_t>> level;
    for (std::size_t i = 0; i < sys.digits.size(); ++i) level.emplace(sys.digits[i], std::vector<std::size_t>{i});
    for (std::int64_t step = 2; step <= k; ++step) {
        std::map<Point, std::vector<std::size_t>> next;
        for (const auto& [value, seq] : level) {
            const Point av = apply_matrix(sys.expansion, value);
            for (std::size_t i = 0; i < sys.digits.size(); ++i) {
                Point point(av);
                for (std::size_t c = 0; c < point.size(); ++c) point[c] += sys.digits[i][c];
                std::vector<std::size_t> path;
                path.reserve(seq.size() + 1);
                path.push_back(i);
                path.insert(path.end(), seq.begin(), seq.end());
                auto [it, fresh] = next.emplace(std::move(point), std::move(path));
                if (!fresh && step == k) {
                    report.witness_a = it->second;
                    report.witness_b.clear();
                    report.witness_b.push_back(i);
                    report.witness_b.insert(report.witness_b.end(), seq.begin(), seq.end());
                    report.collision_value = it->first;
                    return;
                }
            }
        }
        level = std::move(next);
    }
    throw std::logic_error("collision reconstruction found no duplicate");
}

} // namespace

std::int64_t digit_expansion_count(const DigitSystem& sys, std::int64_t k) {
    if (k < 1) throw std::invalid_argument("digit_expansion_count expects k >= 1");
    if (sys.dimension == 1) {
        std::vector<std::int64_t> cur = scalar_digits(sys);
        std::sort(cur.begin(), cur.end());
        cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
        const std::vector<std::int64_t> digits = scalar_digits(sys);
        for (std::int64_t j = 2; j <= k; ++j) cur = scalar_level_up(cur, digits, sys.base);
        return static_cast<std::int64_t>(cur.size());
    }
    std::vector<std::vector<std::int64_t>> cur = sys.digits;
    std::sort(cur.begin(), cur.end());
    cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
    for (std::int64_t j = 2; j <= k; ++j) cur = vector_level_up(cur, sys);
    return static_cast<std::int64_t>(cur.size());
}

CountReport counting_check(const DigitSystem& sys, std::int64_t k_max) {
    if (k_max < 1) throw std::invalid_argument("counting_check expects K >= 1");
    CountReport report;
    std::int64_t expect = 1;
    if (sys.dimension == 1) {
        const std::vector<std::int64_t> digits = scalar_digits(sys);
        std::vector<std::int64_t> cur;
        for (std::int64_t k = 1; k <= k_max; ++k) {
            cur = k == 1 ? digits : scalar_level_up(cur, digits, sys.base);
            if (k == 1) {
                std::sort(cur.begin(), cur.end());
                cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
            }
            expect *= sys.base;
            report.counts.push_back(static_cast<std::int64_t>(cur.size()));
            report.checked_k = k;
            if (report.counts.back() != expect) {
                reconstruct_collision(sys, k, report);
                return report;
            }
        }
    } else {
        std::vector<std::vector<std::int64_t>> cur;
        for (std::int64_t k = 1; k <= k_max; ++k) {
            if (k == 1) {
                cur = sys.digits;
                std::sort(cur.begin(), cur.end());
                cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
            } else {
                cur = vector_level_up(cur, sys);
            }
            expect *= sys.base;
            report.counts.push_back(static_cast<std::int64_t>(cur.size()));
            report.checked_k = k;
            if (report.counts.back() != expect) {
                reconstruct_collision(sys, k, report);
                return report;
            }
        }
    }
    report.pass = true;
    return report;
}

} // namespace tilekit
