#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treetail/rng.hpp"

namespace treetail {

// Rooted tree with per-edge weights, nodes labelled 0..n-1 in insertion
// order, so parent[k] < k along every path. b == 0 marks the linear model
// (no slot structure).
struct WeightedTree {
  int b = 0;
  std::vector<int32_t> parent;       // parent[0] == -1
  std::vector<int8_t> slot;          // child slot under the parent; -1 for root/linear
  std::vector<double> weight;        // weight of the edge to the parent; 0 for the root
  std::vector<double> root_weights;  // the root's drawn weight vector (b-ary, if drawn)

  int64_t size() const { return static_cast<int64_t>(parent.size()); }
};

// Law of the per-node weight vector Z = (Z_1,...,Z_b). Components are
// identically distributed by construction: either all entries equal
// (unit/constant) or a uniformly random permutation of a fixed vector.
class WeightSampler {
 public:
  enum class Kind { unit, constant_vector, uniform_permutation };

  static WeightSampler unit(int b);
  static WeightSampler constant(int b, double value);
  static WeightSampler permutation(std::vector<double> values);
  // "unit", "const:V", or "perm:v1,v2,...,vb"
  static WeightSampler parse(const std::string& text, int b);

  Kind kind() const { return kind_; }
  int b() const { return static_cast<int>(values_.size()); }
  double mu() const;            // E[Z_1]
  double z_norm_bound() const;  // a.s. bound on ||Z|| (here exact: ||values||)
  void draw(Philox4x32& rng, double* out) const;
  // Distinct weight vectors, each realized with equal probability 1/size().
  std::vector<std::vector<double>> support() const;
  std::string describe() const;

 private:
  WeightSampler(Kind kind, std::vector<double> values);
  Kind kind_;
  std::vector<double> values_;  // sorted for uniform_permutation
};

// Grows the b-ary recursive tree of n internal nodes: repeatedly converts a
// uniformly chosen external slot into an internal node. External nodes are
// implicit (a growable array of free slots with swap-remove). Each node's
// weight vector is drawn lazily on its first child attachment and memoized.
WeightedTree grow_bary(int64_t n, int b, const WeightSampler& sampler, Philox4x32& rng);

// Grows the linear recursive tree: node k+1 attaches to node u with
// probability proportional to 1 + beta * deg(u). All edge weights are 1.
// beta = 0 is the random recursive tree, beta = 1 the plane-oriented one.
WeightedTree grow_linear(int64_t n, double beta, Philox4x32& rng);

// Checks the structural invariants (acyclic parent links, labels increasing
// along paths, slot consistency for b-ary trees). Throws on violation.
void validate_tree(const WeightedTree& tree);

}  // namespace treetail
