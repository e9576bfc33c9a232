#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "treetail/tree_models.hpp"

namespace treetail {

// Probability of one support atom. Enumeration results carry an exact
// fraction (path counts over a fixed common denominator, reduced); DP-based
// laws carry extended-precision doubles only (num == -1).
struct Prob {
  double p = 0;
  long long num = -1;
  long long den = 0;
  bool exact() const { return num >= 0; }
};

template <class V>
struct Pmf {
  std::vector<std::pair<V, Prob>> entries;  // sorted by value, deduplicated

  double total_p() const {
    double s = 0;
    for (const auto& e : entries) s += e.second.p;
    return s;
  }
};

// Exact fraction equality via cross multiplication (both sides must be exact).
bool prob_equal(const Prob& a, const Prob& b);

// Total variation distance between two scalar laws (matching on exact values).
double tv_distance(const Pmf<double>& a, const Pmf<double>& b);

// Exact equality of two scalar laws: same support, identical exact weights.
bool pmf_exact_equal(const Pmf<double>& a, const Pmf<double>& b);

Pmf<double> shift_pmf(const Pmf<double>& pmf, double delta);

// Law of g(P, W) under an enumerated joint law, with exact probabilities
// re-aggregated over the enumeration's common denominator.
template <class G>
Pmf<double> combine_joint(const Pmf<std::pair<double, double>>& joint, long long denominator,
                          G&& g);

// Exhaustive law of the growth process: branches over every external-node
// choice and every distinct weight realization (drawn lazily per node).
// Probabilities are exact integer path counts over one common denominator.
struct EnumerationResult {
  Pmf<std::pair<double, double>> joint;    // (P, W)
  Pmf<double> path;
  Pmf<double> wiener;
  Pmf<std::vector<int32_t>> sorted_split;  // root-subtree sizes, descending
  long long denominator = 0;
  long long paths = 0;
};

EnumerationResult enumerate_bary(int n, int b, const WeightSampler& sampler);

// Same for the linear recursive tree with weight u -> 1 + beta * deg(u);
// integer beta keeps the law exactly rational. No split vector (no arity).
EnumerationResult enumerate_linear(int n, int beta);

// Exact marginal of one root-subtree size for the tree of size n, i.e. the
// count of one color after n-1 draws of the Polya urn PU(b) (1 ball per
// color at the start, b-1 added per draw). Extended-precision DP.
Pmf<int64_t> split_marginal(int64_t n, int b);

// E[P_n], E[W_n] for all n <= n_max via the subtree decomposition
//   E[P_n] = b sum_k q_n(k) E[P_k] + mu (n-1)
//   E[W_n] = b sum_k q_n(k) (E[W_k] + (n-k) E[P_k]) + mu b sum_k q_n(k) k (n-k)
// with q_n = split_marginal(n, b). O(n_max^2).
struct ExpectationTable {
  int b = 0;
  double mu = 0;
  std::vector<double> path;    // index n, 0..n_max
  std::vector<double> wiener;

  int64_t n_max() const { return static_cast<int64_t>(path.size()) - 1; }
};

ExpectationTable expectations(int64_t n_max, int b, double mu);

template <class G>
Pmf<double> combine_joint(const Pmf<std::pair<double, double>>& joint, long long denominator,
                          G&& g) {
  std::map<double, long long> counts;
  for (const auto& [value, prob] : joint.entries) {
    counts[g(value.first, value.second)] += prob.num * (denominator / prob.den);
  }
  Pmf<double> out;
  out.entries.reserve(counts.size());
  for (const auto& [value, count] : counts) {
    const long long d = std::gcd(count, denominator);
    Prob prob;
    prob.num = count / d;
    prob.den = denominator / d;
    prob.p = static_cast<double>(count) / static_cast<double>(denominator);
    out.entries.emplace_back(value, prob);
  }
  return out;
}

}  // namespace treetail
