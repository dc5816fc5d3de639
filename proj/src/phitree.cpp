#include "tilekit/phitree.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "tilekit/cyclotomic.hpp"
#include "tilekit/spectra.hpp"

namespace tilekit {

bool is_tree_node(std::int64_t d, std::int64_t b) {
    if (d <= 1) return false;
    for (std::int64_t p : prime_divisors(d))
        if (b % p != 0) return false;
    return true;
}

std::vector<std::int64_t> children(std::int64_t d, std::int64_t b) {
    if (b < 2) throw std::invalid_argument("children: base must be >= 2");
    if (d != 1 && !is_tree_node(d, b))
        throw ForeignPrime("index " + std::to_string(d) + " is not a base-" + std::to_string(b) +
                           " tree node");
    std::vector<std::int64_t> out = expand_substitution(d, b);
    // the root's expansion x^b - 1 contributes index 1, which is not a node;
    // for d > 1 the first applied prime divides d, so d itself never returns
    out.erase(std::remove(out.begin(), out.end(), std::int64_t{1}), out.end());
    if (d > 1 && std::find(out.begin(), out.end(), d) != out.end())
        throw std::logic_error("children: node reproduced itself");
    return out;
}

namespace {

std::int64_t max_or_zero(const std::vector<std::int64_t>& v) {
    return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

bool blocking_dfs(std::int64_t d, int hits_above, const std::vector<std::int64_t>& nodes,
                  std::int64_t max_node, std::int64_t b) {
    const int hits =
        hits_above + (std::binary_search(nodes.begin(), nodes.end(), d) ? 1 : 0);
    if (hits > 1) return false;
    if (d >= max_node) return hits == 1; // deeper indices exceed every node
    for (std::int64_t c : children(d, b))
        if (!blocking_dfs(c, hits, nodes, max_node, b)) return false;
    return true;
}

// Least-cost exact cover of the subtree rooted at d by candidate nodes:
// either d itself is selected, or every child subtree is covered.
struct Cover {
    std::int64_t cost = 0;                // sum of phi over chosen nodes
    std::vector<std::int64_t> nodes;      // sorted
};

bool better(const Cover& a, const Cover& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.nodes < b.nodes;
}

std::optional<Cover> subtree_cover(std::int64_t d, const std::vector<std::int64_t>& cand,
                                   std::int64_t max_cand, std::int64_t b,
                                   std::map<std::int64_t, std::optional<Cover>>& memo) {
    auto it = memo.find(d);
    if (it != memo.end()) return it->second;

    std::optional<Cover> best;
    if (std::binary_search(cand.begin(), cand.end(), d))
        best = Cover{euler_phi(d), {d}};
    if (d < max_cand) {
        Cover merged;
        bool ok = true;
        for (std::int64_t c : children(d, b)) {
            auto sub = subtree_cover(c, cand, max_cand, b, memo);
            if (!sub) {
                ok = false;
                break;
            }
            merged.cost += sub->cost;
            merged.nodes.insert(merged.nodes.end(), sub->nodes.begin(), sub->nodes.end());
        }
        if (ok) {
            std::sort(merged.nodes.begin(), merged.nodes.end());
            if (!best || better(merged, *best)) best = std::move(merged);
        }
    }
    memo.emplace(d, best);
    return best;
}

// A root path through cover-less nodes; every index on it misses the
// candidate set, and the last index exceeds every candidate.
std::vector<std::int64_t> uncovered_path(std::int64_t root, const std::vector<std::int64_t>& cand,
                                         std::int64_t max_cand, std::int64_t b,
                                         std::map<std::int64_t, std::optional<Cover>>& memo) {
    std::vector<std::int64_t> path{root};
    std::int64_t d = root;
    while (d < max_cand) {
        bool stepped = false;
        for (std::int64_t c : children(d, b)) {
            if (!subtree_cover(c, cand, max_cand, b, memo)) {
                path.push_back(c);
                d = c;
                stepped = true;
                break;
            }
        }
        if (!stepped) break; // d itself already exceeds or equals every candidate
    }
    return path;
}

} // namespace

bool is_blocking(const std::vector<std::int64_t>& nodes, std::int64_t b) {
    if (b < 2) throw std::invalid_argument("is_blocking: base must be >= 2");
    for (std::int64_t d : nodes)
        if (!is_tree_node(d, b))
            throw NotATreeNode("index " + std::to_string(d) + " is not a base-" +
                               std::to_string(b) + " tree node");
    if (nodes.empty()) return false;
    std::vector<std::int64_t> sorted(nodes);
    std::sort(sorted.begin(), sorted.end());
    const std::int64_t max_node = sorted.back();
    for (std::int64_t root : children(1, b))
        if (!blocking_dfs(root, 0, sorted, max_node, b)) return false;
    return true;
}

std::optional<Blocking> find_blocking(const std::vector<std::int64_t>& candidates,
                                      std::int64_t b) {
    if (b < 2) throw std::invalid_argument("find_blocking: base must be >= 2");
    std::vector<std::int64_t> cand;
    for (std::int64_t d : candidates)
        if (is_tree_node(d, b)) cand.push_back(d);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    const std::int64_t max_cand = max_or_zero(cand);
    std::map<std::int64_t, std::optional<Cover>> memo;
    Blocking result;
    result.base = b;
    for (std::int64_t root : children(1, b)) {
        auto cover = subtree_cover(root, cand, max_cand, b, memo);
        if (!cover) return std::nullopt;
        result.nodes.insert(result.nodes.end(), cover->nodes.begin(), cover->nodes.end());
    }
    std::sort(result.nodes.begin(), result.nodes.end());
    return result;
}

IntPoly kernel_polynomial(const Blocking& n) {
    IntPoly prod = IntPoly::constant(1);
    for (std::int64_t d : n.nodes) prod = prod * cyclotomic(d);
    return prod;
}

TileDigitDecision is_tile_digit_set(const DigitSet& d, std::int64_t b) {
    if (b < 2 || static_cast<std::int64_t>(d.cardinality()) != b)
        throw CardinalityMismatch("digit set cardinality " + std::to_string(d.cardinality()) +
                                  " differs from base " + std::to_string(b));
    if (!d.anchored())
        throw NotAnchored("digit set must contain 0 and have gcd 1");

    TileDigitDecision out;
    const IntPoly p = mask_polynomial(d);
    // b-smooth spectrum = full spectrum restricted to base-b tree nodes
    out.candidates = smooth_spectrum(p, b);

    auto blocking = find_blocking(out.candidates, b);
    if (blocking) {
        out.accept = true;
        out.blocking = std::move(*blocking);
        out.kernel = kernel_polynomial(out.blocking);
        return out;
    }

    // rebuild the DP to extract a witness path (small and deterministic)
    const std::int64_t max_cand = max_or_zero(out.candidates);
    std::map<std::int64_t, std::optional<Cover>> memo;
    for (std::int64_t root : children(1, b)) {
        if (subtree_cover(root, out.candidates, max_cand, b, memo)) continue;
        out.witness_path = uncovered_path(root, out.candidates, max_cand, b, memo);
        break;
    }
    return out;
}

} // namespace tilekit
