#include "treetail/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace treetail {

namespace {

struct KahanSum {
  double sum = 0, carry = 0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

std::vector<int64_t> subtree_sizes(const WeightedTree& tree) {
  const int64_t n = tree.size();
  std::vector<int64_t> sizes(n, 1);
  for (int64_t k = n - 1; k >= 1; --k) sizes[tree.parent[k]] += sizes[k];
  return sizes;
}

FunctionalPair compute_functionals(const WeightedTree& tree) {
  const int64_t n = tree.size();
  const auto sizes = subtree_sizes(tree);
  KahanSum p, w;
  for (int64_t k = 1; k < n; ++k) {
    const double zs = tree.weight[k] * static_cast<double>(sizes[k]);
    p.add(zs);
    w.add(zs * static_cast<double>(n - sizes[k]));
  }
  return FunctionalPair{p.sum, w.sum};
}

double path_length(const WeightedTree& tree) { return compute_functionals(tree).path_length; }

double wiener_index(const WeightedTree& tree) { return compute_functionals(tree).wiener; }

double path_length_by_depth(const WeightedTree& tree) {
  const int64_t n = tree.size();
  std::vector<double> depth(n, 0.0);
  KahanSum p;
  for (int64_t k = 1; k < n; ++k) {
    depth[k] = depth[tree.parent[k]] + tree.weight[k];
    p.add(depth[k]);
  }
  return p.sum;
}

double wiener_index_pairwise(const WeightedTree& tree) {
  const int64_t n = tree.size();
  std::vector<double> wdepth(n, 0.0);
  std::vector<int32_t> edepth(n, 0);
  for (int64_t k = 1; k < n; ++k) {
    wdepth[k] = wdepth[tree.parent[k]] + tree.weight[k];
    edepth[k] = edepth[tree.parent[k]] + 1;
  }
  KahanSum w;
  for (int64_t u = 0; u < n; ++u) {
    for (int64_t v = u + 1; v < n; ++v) {
      int64_t a = u, b = v;
      while (a != b) {
        if (edepth[a] >= edepth[b]) {
          a = tree.parent[a];
        } else {
          b = tree.parent[b];
        }
      }
      w.add(wdepth[u] + wdepth[v] - 2.0 * wdepth[a]);
    }
  }
  return w.sum;
}

std::vector<int64_t> root_split(const WeightedTree& tree) {
  if (tree.b <= 0) throw std::invalid_argument("root_split: tree has no fixed slot arity");
  const auto sizes = subtree_sizes(tree);
  std::vector<int64_t> split(tree.b, 0);
  for (int64_t k = 1; k < tree.size(); ++k) {
    if (tree.parent[k] == 0) split[tree.slot[k]] = sizes[k];
  }
  return split;
}

std::vector<RootSubtree> root_subtrees(const WeightedTree& tree) {
  if (tree.b <= 0) throw std::invalid_argument("root_subtrees: tree has no fixed slot arity");
  const int64_t n = tree.size();
  const int b = tree.b;
  const auto sizes = subtree_sizes(tree);

  std::vector<RootSubtree> result(b);
  for (int s = 0; s < b; ++s) {
    result[s].edge_weight =
        tree.root_weights.empty() ? 0.0 : tree.root_weights[s];
  }
  if (n == 1) return result;

  // top[k]: which root child's subtree node k belongs to (-1 for the root).
  std::vector<int32_t> top(n, -1);
  std::vector<KahanSum> p(b), w(b);
  for (int64_t k = 1; k < n; ++k) {
    const int32_t parent = tree.parent[k];
    if (parent == 0) {
      top[k] = static_cast<int32_t>(k);
      auto& sub = result[tree.slot[k]];
      sub.size = sizes[k];
      sub.edge_weight = tree.weight[k];
      continue;
    }
    top[k] = top[parent];
    const int slot = tree.slot[top[k]];
    const double zs = tree.weight[k] * static_cast<double>(sizes[k]);
    p[slot].add(zs);
    w[slot].add(zs * static_cast<double>(sizes[top[k]] - sizes[k]));
  }
  for (int s = 0; s < b; ++s) {
    result[s].path_length = p[s].sum;
    result[s].wiener = w[s].sum;
  }
  return result;
}

}  // namespace treetail
