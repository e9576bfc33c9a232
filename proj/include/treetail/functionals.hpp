#pragma once

#include <cstdint>
#include <vector>

#include "treetail/tree_models.hpp"

namespace treetail {

// Weighted internal path length (sum over nodes of the weighted distance to
// the root) and weighted Wiener index (sum over unordered node pairs of the
// weighted path distance). Unit weights recover the edge-count definitions.
struct FunctionalPair {
  double path_length = 0;
  double wiener = 0;
};

// Both functionals in one O(n) pass over the edge decomposition
//   P = sum_e z_e s_e,   W = sum_e z_e s_e (n - s_e),
// where s_e counts the nodes below edge e. Compensated summation throughout.
FunctionalPair compute_functionals(const WeightedTree& tree);
double path_length(const WeightedTree& tree);
double wiener_index(const WeightedTree& tree);

// Independent routes for cross-checking: depth accumulation for P, and the
// O(n^2) all-pairs distance sum for W.
double path_length_by_depth(const WeightedTree& tree);
double wiener_index_pairwise(const WeightedTree& tree);

// Number of nodes in the subtree rooted at each node (the node included).
std::vector<int64_t> subtree_sizes(const WeightedTree& tree);

// Slot-ordered root-subtree sizes (I_1,...,I_b); their sum is n-1.
// Rejects linear-model trees.
std::vector<int64_t> root_split(const WeightedTree& tree);

// Per-root-subtree data used by the recursion residual: size, the weight of
// the edge from the root, and the subtree's own functionals (distances
// measured inside the subtree).
struct RootSubtree {
  int64_t size = 0;
  double edge_weight = 0;
  double path_length = 0;
  double wiener = 0;
};

std::vector<RootSubtree> root_subtrees(const WeightedTree& tree);

}  // namespace treetail
