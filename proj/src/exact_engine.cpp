#include "treetail/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace treetail {

namespace {

constexpr long long kPathBudget = 20'000'000;

long long ipow(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

Prob make_exact(long long num, long long den) {
  const long long g = std::gcd(num, den);
  Prob prob;
  prob.num = num / g;
  prob.den = den / g;
  prob.p = static_cast<double>(num) / static_cast<double>(den);
  return prob;
}

template <class V>
Pmf<V> to_pmf(const std::map<V, long long>& counts, long long den) {
  Pmf<V> pmf;
  pmf.entries.reserve(counts.size());
  for (const auto& [value, count] : counts) {
    pmf.entries.emplace_back(value, make_exact(count, den));
  }
  return pmf;
}

// Shared enumeration scratch for the b-ary process. Arrays are mutated along
// the recursion and undone on the way back.
struct BaryEnumerator {
  int n, b;
  std::vector<std::vector<double>> options;  // distinct weight vectors, equal prob
  long long den = 0;
  long long paths = 0;

  std::vector<int32_t> parent;
  std::vector<int8_t> slot;
  std::vector<double> weight;
  std::vector<double> z;        // n*b, per-node drawn vector
  std::vector<uint8_t> drawn;
  std::vector<int32_t> externals;

  std::map<std::pair<double, double>, long long> joint;
  std::map<std::vector<int32_t>, long long> splits;

  void run() {
    parent.assign(n, -1);
    slot.assign(n, -1);
    weight.assign(n, 0.0);
    z.assign(static_cast<size_t>(n) * b, 0.0);
    drawn.assign(n, 0);
    externals.clear();
    if (n == 1) {
      joint[{0.0, 0.0}] = den = 1;
      splits[std::vector<int32_t>(b, 0)] = 1;
      paths = 1;
      return;
    }
    long long estimated = 1;
    for (int k = 1; k < n; ++k) {
      estimated *= (k * (b - 1) + 1) * static_cast<long long>(options.size());
      if (estimated > kPathBudget) {
        throw std::invalid_argument("enumerate_bary: state count exceeds budget");
      }
    }
    den = ipow(static_cast<long long>(options.size()), n);
    for (int k = 1; k < n; ++k) den *= k * (b - 1) + 1;
    for (int s = 0; s < b; ++s) externals.push_back(s);
    step(1, 0);
  }

  void step(int k, int drawn_count) {
    if (k == n) {
      finish(drawn_count);
      return;
    }
    const size_t ext_count = externals.size();
    for (size_t idx = 0; idx < ext_count; ++idx) {
      const int32_t packed = externals[idx];
      externals[idx] = externals.back();
      externals.pop_back();

      const int32_t p = packed / b;
      const int s = packed % b;
      if (!drawn[p]) {
        drawn[p] = 1;
        for (const auto& option : options) {
          std::copy(option.begin(), option.end(), z.begin() + static_cast<size_t>(p) * b);
          attach(k, p, s, drawn_count + 1);
        }
        drawn[p] = 0;
      } else {
        attach(k, p, s, drawn_count);
      }

      if (idx < externals.size()) {
        externals.push_back(externals[idx]);
        externals[idx] = packed;
      } else {
        externals.push_back(packed);
      }
    }
  }

  void attach(int k, int32_t p, int s, int drawn_count) {
    parent[k] = p;
    slot[k] = static_cast<int8_t>(s);
    weight[k] = z[static_cast<size_t>(p) * b + s];
    for (int t = 0; t < b; ++t) externals.push_back(k * b + t);
    step(k + 1, drawn_count);
    externals.resize(externals.size() - b);
  }

  void finish(int drawn_count) {
    const long long numerator = ipow(static_cast<long long>(options.size()), n - drawn_count);
    ++paths;

    std::vector<int64_t> sizes(n, 1);
    for (int k = n - 1; k >= 1; --k) sizes[parent[k]] += sizes[k];
    double p_sum = 0, w_sum = 0;
    for (int k = 1; k < n; ++k) {
      const double zs = weight[k] * static_cast<double>(sizes[k]);
      p_sum += zs;
      w_sum += zs * static_cast<double>(n - sizes[k]);
    }
    joint[{p_sum, w_sum}] += numerator;

    std::vector<int32_t> split(b, 0);
    for (int k = 1; k < n; ++k) {
      if (parent[k] == 0) split[slot[k]] = static_cast<int32_t>(sizes[k]);
    }
    std::sort(split.begin(), split.end(), std::greater<>());
    splits[split] += numerator;
  }
};

struct LinearEnumerator {
  int n, beta;
  long long den = 0;
  long long paths = 0;
  std::vector<int32_t> parent, deg;
  std::map<std::pair<double, double>, long long> joint;

  void run() {
    parent.assign(n, -1);
    deg.assign(n, 0);
    if (n == 1) {
      joint[{0.0, 0.0}] = den = paths = 1;
      return;
    }
    long long estimated = 1;
    for (int k = 1; k < n; ++k) {
      estimated *= k;
      if (estimated > kPathBudget) {
        throw std::invalid_argument("enumerate_linear: state count exceeds budget");
      }
    }
    den = 1;
    for (int k = 1; k < n; ++k) den *= k + static_cast<long long>(beta) * (k - 1);
    step(1, 1);
  }

  void step(int k, long long numerator) {
    if (k == n) {
      finish(numerator);
      return;
    }
    for (int u = 0; u < k; ++u) {
      const long long wu = 1 + static_cast<long long>(beta) * deg[u];
      parent[k] = u;
      ++deg[u];
      step(k + 1, numerator * wu);
      --deg[u];
    }
  }

  void finish(long long numerator) {
    ++paths;
    std::vector<int64_t> sizes(n, 1);
    for (int k = n - 1; k >= 1; --k) sizes[parent[k]] += sizes[k];
    double p_sum = 0, w_sum = 0;
    for (int k = 1; k < n; ++k) {
      p_sum += static_cast<double>(sizes[k]);
      w_sum += static_cast<double>(sizes[k]) * static_cast<double>(n - sizes[k]);
    }
    joint[{p_sum, w_sum}] += numerator;
  }
};

Pmf<double> marginal(const Pmf<std::pair<double, double>>& joint, bool second, long long den) {
  std::map<double, long long> counts;
  for (const auto& [value, prob] : joint.entries) {
    counts[second ? value.second : value.first] += prob.num * (den / prob.den);
  }
  return to_pmf(counts, den);
}

}  // namespace

bool prob_equal(const Prob& a, const Prob& b) {
  if (!a.exact() || !b.exact()) throw std::invalid_argument("prob_equal: needs exact fractions");
  return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
}

double tv_distance(const Pmf<double>& a, const Pmf<double>& b) {
  double tv = 0;
  size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j == b.entries.size() ||
        (i < a.entries.size() && a.entries[i].first < b.entries[j].first)) {
      tv += a.entries[i++].second.p;
    } else if (i == a.entries.size() || b.entries[j].first < a.entries[i].first) {
      tv += b.entries[j++].second.p;
    } else {
      tv += std::abs(a.entries[i].second.p - b.entries[j].second.p);
      ++i;
      ++j;
    }
  }
  return 0.5 * tv;
}

bool pmf_exact_equal(const Pmf<double>& a, const Pmf<double>& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].first != b.entries[i].first) return false;
    if (!prob_equal(a.entries[i].second, b.entries[i].second)) return false;
  }
  return true;
}

Pmf<double> shift_pmf(const Pmf<double>& pmf, double delta) {
  Pmf<double> out = pmf;
  for (auto& e : out.entries) e.first += delta;
  return out;
}

EnumerationResult enumerate_bary(int n, int b, const WeightSampler& sampler) {
  if (n < 1) throw std::invalid_argument("enumerate_bary: n must be >= 1");
  if (sampler.b() != b) throw std::invalid_argument("enumerate_bary: sampler arity mismatch");
  BaryEnumerator e;
  e.n = n;
  e.b = b;
  e.options = sampler.support();
  e.run();

  long long total = 0;
  for (const auto& [value, count] : e.joint) total += count;
  if (total != e.den) throw std::logic_error("enumerate_bary: path counts do not sum to one");

  EnumerationResult result;
  result.denominator = e.den;
  result.paths = e.paths;
  result.joint = to_pmf(e.joint, e.den);
  result.sorted_split = to_pmf(e.splits, e.den);
  result.path = marginal(result.joint, false, e.den);
  result.wiener = marginal(result.joint, true, e.den);
  return result;
}

EnumerationResult enumerate_linear(int n, int beta) {
  if (n < 1) throw std::invalid_argument("enumerate_linear: n must be >= 1");
  if (beta < 0) throw std::invalid_argument("enumerate_linear: beta must be nonnegative");
  LinearEnumerator e;
  e.n = n;
  e.beta = beta;
  e.run();

  long long total = 0;
  for (const auto& [value, count] : e.joint) total += count;
  if (total != e.den) throw std::logic_error("enumerate_linear: path counts do not sum to one");

  EnumerationResult result;
  result.denominator = e.den;
  result.paths = e.paths;
  result.joint = to_pmf(e.joint, e.den);
  result.path = marginal(result.joint, false, e.den);
  result.wiener = marginal(result.joint, true, e.den);
  return result;
}

Pmf<int64_t> split_marginal(int64_t n, int b) {
  if (n < 1) throw std::invalid_argument("split_marginal: n must be >= 1");
  if (b < 2) throw std::invalid_argument("split_marginal: b must be >= 2");
  std::vector<long double> row(static_cast<size_t>(n), 0.0L);
  row[0] = 1.0L;
  for (int64_t m = 0; m < n - 1; ++m) {
    // one more draw: count of color 1 moves j -> j+1 with weight (1+j(b-1))
    const long double den = b + static_cast<long double>(m) * (b - 1);
    for (int64_t j = m; j >= 0; --j) {
      const long double up = (1 + static_cast<long double>(j) * (b - 1)) / den;
      row[j + 1] += row[j] * up;
      row[j] *= 1.0L - up;
    }
  }
  Pmf<int64_t> pmf;
  pmf.entries.reserve(static_cast<size_t>(n));
  for (int64_t j = 0; j < n; ++j) {
    Prob prob;
    prob.p = static_cast<double>(row[j]);
    pmf.entries.emplace_back(j, prob);
  }
  return pmf;
}

ExpectationTable expectations(int64_t n_max, int b, double mu) {
  if (n_max < 1) throw std::invalid_argument("expectations: n_max must be >= 1");
  if (b < 2) throw std::invalid_argument("expectations: b must be >= 2");
  if (!(mu >= 0)) throw std::invalid_argument("expectations: mu must be nonnegative");

  ExpectationTable table;
  table.b = b;
  table.mu = mu;
  table.path.assign(n_max + 1, 0.0);
  table.wiener.assign(n_max + 1, 0.0);

  std::vector<long double> row(static_cast<size_t>(n_max), 0.0L);
  row[0] = 1.0L;  // zero draws
  for (int64_t n = 2; n <= n_max; ++n) {
    // evolve the split marginal from n-2 to n-1 draws
    const int64_t m = n - 2;
    const long double den = b + static_cast<long double>(m) * (b - 1);
    for (int64_t j = m; j >= 0; --j) {
      const long double up = (1 + static_cast<long double>(j) * (b - 1)) / den;
      row[j + 1] += row[j] * up;
      row[j] *= 1.0L - up;
    }
    long double sp = 0, spw = 0, sjk = 0;
    for (int64_t j = 0; j < n; ++j) {
      const long double q = row[j];
      if (q == 0) continue;
      sp += q * table.path[j];
      spw += q * (table.wiener[j] + static_cast<long double>(n - j) * table.path[j]);
      sjk += q * static_cast<long double>(j) * static_cast<long double>(n - j);
    }
    table.path[n] = static_cast<double>(b * sp + mu * (n - 1));
    table.wiener[n] = static_cast<double>(b * spw + mu * b * sjk);
  }
  return table;
}

}  // namespace treetail
