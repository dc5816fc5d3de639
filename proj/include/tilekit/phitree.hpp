#ifndef TILEKIT_PHITREE_HPP
#define TILEKIT_PHITREE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "tilekit/polyring.hpp"

namespace tilekit {

/**
 * The base-b tree of cyclotomic indices: level 1 holds the divisors of b
 * greater than 1, and the children of d are the indices of the cyclotomic
 * factors of Phi_d(x^b). Indices strictly increase along root paths, which
 * is what makes finite searches on the infinite tree possible.
 */

// True iff d is a node of the base-b tree: d > 1 and every prime of d
// divides b.
bool is_tree_node(std::int64_t d, std::int64_t b);

// Child indices of d (ascending). d = 1 yields level 1. Throws
// ForeignPrime when d has a prime factor outside b.
std::vector<std::int64_t> children(std::int64_t d, std::int64_t b);

/** A finite node set meant to meet every infinite root path exactly once. */
struct Blocking {
    std::vector<std::int64_t> nodes; // ascending
    std::int64_t base = 0;
};

// Exact decision of the blocking property. Throws NotATreeNode when a
// member is not a base-b tree node. The empty set is not a blocking.
bool is_blocking(const std::vector<std::int64_t>& nodes, std::int64_t b);

// Some blocking contained in candidates, if any exists; exhaustive via
// per-subtree dynamic programming (each node either represents its whole
// subtree or delegates to all children). Among admissible blockings the
// one minimizing total degree sum phi(d) is returned, ties broken
// lexicographically on the sorted node list. Non-tree-node candidates are
// ignored.
std::optional<Blocking> find_blocking(const std::vector<std::int64_t>& candidates,
                                      std::int64_t b);

// Product of Phi_d over the blocking.
IntPoly kernel_polynomial(const Blocking& n);

/**
 * Tile-digit-set decision: ACCEPT carries the chosen blocking inside the
 * spectrum of the mask and its kernel polynomial (which divides the mask);
 * REJECT carries a root path disjoint from the spectrum whose last index
 * exceeds every candidate — no blocking can meet that path.
 */
struct TileDigitDecision {
    bool accept = false;
    Blocking blocking;                       // ACCEPT only
    IntPoly kernel;                          // ACCEPT only
    std::vector<std::int64_t> candidates;    // spectrum restricted to tree nodes
    std::vector<std::int64_t> witness_path;  // REJECT only
};
// Requires #d == b (CardinalityMismatch) and d anchored (NotAnchored).
TileDigitDecision is_tile_digit_set(const DigitSet& d, std::int64_t b);

} // namespace tilekit

#endif
