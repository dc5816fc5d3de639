#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <vector>

#include "tilekit/errors.hpp"
#include "tilekit/phitree.hpp"
#include "tilekit/tilecheck.hpp"

using namespace tilekit;

namespace {

DigitSet ds(std::vector<std::int64_t> v) { return DigitSet(std::move(v)); }

using Mat = std::vector<std::vector<std::int64_t>>;
using Vecs = std::vector<std::vector<std::int64_t>>;

// Independent expansion: value of the digit-index sequence (LSB first).
std::vector<std::int64_t> expand_sequence(const DigitSystem& sys,
                                          const std::vector<std::size_t>& seq) {
    const std::size_t s = static_cast<std::size_t>(sys.dimension);
    std::vector<std::int64_t> value(s, 0);
    for (std::size_t pos = seq.size(); pos-- > 0;) {
        std::vector<std::int64_t> next(s, 0);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) next[i] += sys.expansion[i][j] * value[j];
        for (std::size_t i = 0; i < s; ++i) next[i] += sys.digits[seq[pos]][i];
        value = next;
    }
    return value;
}

// Brute-force #D_k by enumerating every digit sequence.
std::int64_t count_oracle(const DigitSystem& sys, std::int64_t k) {
    std::set<std::vector<std::int64_t>> seen;
    std::vector<std::size_t> seq(static_cast<std::size_t>(k), 0);
    const std::size_t b = sys.digits.size();
    while (true) {
        seen.insert(expand_sequence(sys, seq));
        std::size_t pos = 0;
        while (pos < seq.size() && ++seq[pos] == b) seq[pos++] = 0;
        if (pos == seq.size()) break;
    }
    return static_cast<std::int64_t>(seen.size());
}

} // namespace

TEST_CASE("digit_expansion_count matches the frozen examples") {
    const DigitSystem bad = scalar_system(4, ds({0, 1, 4, 5}));
    CHECK(digit_expansion_count(bad, 1) == 4);
    CHECK(digit_expansion_count(bad, 2) == 12); // #(D + 4D) = 12 < 16
    const DigitSystem good = scalar_system(4, ds({0, 1, 8, 9}));
    CHECK(digit_expansion_count(good, 2) == 16);
    const DigitSystem planar =
        matrix_system({{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    CHECK(digit_expansion_count(planar, 2) == 16);

    // cross-check against direct sequence enumeration
    for (std::int64_t k = 1; k <= 4; ++k) {
        CHECK(digit_expansion_count(bad, k) == count_oracle(bad, k));
        CHECK(digit_expansion_count(good, k) == count_oracle(good, k));
    }
    for (std::int64_t k = 1; k <= 3; ++k)
        CHECK(digit_expansion_count(planar, k) == count_oracle(planar, k));

    CHECK_THROWS_AS(digit_expansion_count(good, 0), std::invalid_argument);
}

TEST_CASE("counting_check reports the first failing level with a collision") {
    const CountReport pass = counting_check(scalar_system(4, ds({0, 1, 8, 9})), 4);
    CHECK(pass.pass);
    CHECK(pass.checked_k == 4);
    CHECK(pass.counts == std::vector<std::int64_t>{4, 16, 64, 256});

    const DigitSystem bad = scalar_system(4, ds({0, 1, 4, 5}));
    const CountReport fail = counting_check(bad, 4);
    CHECK_FALSE(fail.pass);
    CHECK(fail.checked_k == 2);
    CHECK(fail.counts == std::vector<std::int64_t>{4, 12});
    REQUIRE(fail.witness_a.size() == 2);
    REQUIRE(fail.witness_b.size() == 2);
    CHECK(fail.witness_a != fail.witness_b);
    CHECK(expand_sequence(bad, fail.witness_a) == fail.collision_value);
    CHECK(expand_sequence(bad, fail.witness_b) == fail.collision_value);

    const CountReport binary = counting_check(scalar_system(2, ds({0, 1})), 8);
    CHECK(binary.pass);
    CHECK(binary.counts.back() == 256);

    CHECK_THROWS_AS(counting_check(bad, 0), std::invalid_argument);
}

TEST_CASE("counting failure is monotone in depth") {
    // every anchored 4-digit set with max <= 12: once a level fails, all
    // deeper levels fail too
    std::vector<std::int64_t> pool;
    for (std::int64_t v = 1; v <= 12; ++v) pool.push_back(v);
    for (std::size_t a = 0; a < pool.size(); ++a)
        for (std::size_t b = a + 1; b < pool.size(); ++b)
            for (std::size_t c = b + 1; c < pool.size(); ++c) {
                const DigitSystem sys =
                    scalar_system(4, ds({0, pool[a], pool[b], pool[c]}));
                bool failed = false;
                std::int64_t expect = 1;
                for (std::int64_t k = 1; k <= 4; ++k) {
                    expect *= 4;
                    const bool ok = digit_expansion_count(sys, k) == expect;
                    if (failed) CHECK_FALSE(ok);
                    if (!ok) failed = true;
                }
            }
}

TEST_CASE("counting agrees with the blocking decision at desk scale") {
    // b = 4, anchored, max <= 12: ACCEPT <=> PASS(K=4) on this corpus
    std::vector<std::int64_t> pool;
    for (std::int64_t v = 1; v <= 12; ++v) pool.push_back(v);
    std::int64_t accepts = 0;
    for (std::size_t a = 0; a < pool.size(); ++a)
        for (std::size_t b = a + 1; b < pool.size(); ++b)
            for (std::size_t c = b + 1; c < pool.size(); ++c) {
                const DigitSet d = ds({0, pool[a], pool[b], pool[c]});
                if (!d.anchored()) continue; // blocking decision needs gcd 1
                const bool accept = is_tile_digit_set(d, 4).accept;
                const bool pass = counting_check(scalar_system(4, d), 4).pass;
                CAPTURE(d.str());
                CHECK(accept == pass);
                accepts += accept;
            }
    CHECK(accepts > 0);
}

TEST_CASE("digit systems validate their shape") {
    CHECK_THROWS_AS(scalar_system(1, ds({0})), NotExpanding);
    CHECK_THROWS_AS(scalar_system(4, ds({0, 1, 2})), CardinalityMismatch);

    CHECK_THROWS_AS(matrix_system({{1, 0}, {0, 1}}, {{0, 0}}), NotExpanding);
    CHECK_THROWS_AS(matrix_system({{2, 0}, {0, 0}}, Vecs{}), NotExpanding);
    CHECK_THROWS_AS(matrix_system({{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}}),
                    CardinalityMismatch);
    CHECK_THROWS_AS(matrix_system({{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}, {0, 1}}),
                    CardinalityMismatch);
    CHECK_THROWS_AS(matrix_system({{2}, {0}}, {{0}, {1}}), std::invalid_argument);
    CHECK_THROWS_AS(matrix_system({{2, 0}, {0, 2}}, {{0}, {1}, {2}, {3}}),
                    std::invalid_argument);

    // |det| = 2 but one eigenvalue sits at 1: the spectral screen rejects,
    // the explicit override defers to the caller
    const Mat shear = {{2, 0}, {0, 1}};
    Mat sheared = {{2, 0}, {3, 1}};
    CHECK_THROWS_AS(matrix_system(shear, {{0, 0}, {1, 0}}), NotExpanding);
    CHECK_THROWS_AS(matrix_system(sheared, {{0, 0}, {1, 0}}), NotExpanding);
    const DigitSystem forced = matrix_system(sheared, {{0, 0}, {1, 0}}, true);
    CHECK(forced.base == 2);

    // genuinely expanding matrices pass the screen
    CHECK(matrix_system({{0, -2}, {1, 0}}, {{0, 0}, {1, 0}}).base == 2);
    CHECK(matrix_system({{1, -2}, {1, 1}}, {{0, 0}, {1, 0}, {0, 1}}).base == 3);

    CHECK(matrix_determinant({{2, 0}, {0, 2}}) == 4);
    CHECK(matrix_determinant({{0, -2}, {1, 0}}) == 2);
    CHECK(matrix_determinant({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}) == 0);
    CHECK(characteristic_polynomial({{0, -2}, {1, 0}}) ==
          std::vector<std::int64_t>{2, 0, 1});
    CHECK(characteristic_polynomial({{2, 1}, {0, 3}}) ==
          std::vector<std::int64_t>{6, -5, 1});
}

TEST_CASE("matrix counting detects a planar collision") {
    // A = 2I with digits {(0,0),(1,0),(0,1),(2,0)}: (2,0) = A(1,0) so level
    // 2 collides
    const DigitSystem sys =
        matrix_system({{2, 0}, {0, 2}}, {{0, 0}, {1, 0}, {0, 1}, {2, 0}});
    const CountReport r = counting_check(sys, 3);
    CHECK_FALSE(r.pass);
    CHECK(r.checked_k == 2);
    CHECK(expand_sequence(sys, r.witness_a) == r.collision_value);
    CHECK(expand_sequence(sys, r.witness_b) == r.collision_value);
    CHECK(r.witness_a != r.witness_b);
}

TEST_CASE("the memory budget caps level construction") {
    setenv("TILEKIT_BUDGET_MB", "1", 1);
    const DigitSystem sys = scalar_system(2, ds({0, 1}));
    CHECK_THROWS_AS(digit_expansion_count(sys, 30), BudgetExceeded);
    CHECK(digit_expansion_count(sys, 10) == 1024);
    unsetenv("TILEKIT_BUDGET_MB");
    CHECK(digit_expansion_count(sys, 21) == (std::int64_t{1} << 21));
}
