#include "treetail/tree_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace treetail {

namespace {

// Fenwick tree over node weights; supports prefix-sum sampling in O(log n).
class FenwickSum {
 public:
  explicit FenwickSum(size_t capacity) : tree_(capacity + 1, 0.0) {}

  void add(size_t i, double delta) {
    total_ += delta;
    for (size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }

  double total() const { return total_; }

  // Smallest index i with prefix_sum(0..i) > r; clamps to the last index.
  size_t find(double r, size_t count) const {
    size_t pos = 0;
    size_t mask = 1;
    while (mask * 2 < tree_.size()) mask *= 2;
    for (; mask > 0; mask /= 2) {
      const size_t next = pos + mask;
      if (next < tree_.size() && tree_[next] <= r) {
        pos = next;
        r -= tree_[next];
      }
    }
    return std::min(pos, count - 1);
  }

 private:
  std::vector<double> tree_;
  double total_ = 0;
};

}  // namespace

WeightSampler::WeightSampler(Kind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("WeightSampler: b must be >= 2");
  for (double v : values_) {
    if (!(v >= 0)) throw std::invalid_argument("WeightSampler: weights must be nonnegative");
  }
  if (kind_ == Kind::uniform_permutation) {
    std::sort(values_.begin(), values_.end());
  } else {
    for (double v : values_) {
      if (v != values_[0]) {
        throw std::invalid_argument(
            "WeightSampler: constant_vector entries must be equal (identical marginals)");
      }
    }
  }
}

WeightSampler WeightSampler::unit(int b) {
  return WeightSampler(Kind::unit, std::vector<double>(b, 1.0));
}

WeightSampler WeightSampler::constant(int b, double value) {
  return WeightSampler(Kind::constant_vector, std::vector<double>(b, value));
}

WeightSampler WeightSampler::permutation(std::vector<double> values) {
  return WeightSampler(Kind::uniform_permutation, std::move(values));
}

WeightSampler WeightSampler::parse(const std::string& text, int b) {
  if (text == "unit") return unit(b);
  if (text.rfind("const:", 0) == 0) return constant(b, std::stod(text.substr(6)));
  if (text.rfind("perm:", 0) == 0) {
    std::vector<double> values;
    std::stringstream ss(text.substr(5));
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    if (static_cast<int>(values.size()) != b) {
      throw std::invalid_argument("WeightSampler: perm list must have b entries");
    }
    return permutation(std::move(values));
  }
  throw std::invalid_argument("WeightSampler: unknown spec '" + text + "'");
}

double WeightSampler::mu() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / values_.size();
}

double WeightSampler::z_norm_bound() const {
  double s = 0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

void WeightSampler::draw(Philox4x32& rng, double* out) const {
  const size_t b = values_.size();
  std::copy(values_.begin(), values_.end(), out);
  if (kind_ != Kind::uniform_permutation) return;
  for (size_t i = b - 1; i > 0; --i) {
    const size_t j = rng.next_below(i + 1);
    std::swap(out[i], out[j]);
  }
}

std::vector<std::vector<double>> WeightSampler::support() const {
  if (kind_ != Kind::uniform_permutation) return {values_};
  std::vector<std::vector<double>> result;
  std::vector<double> v = values_;  // sorted; next_permutation yields each distinct arrangement
  do {
    result.push_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return result;
}

std::string WeightSampler::describe() const {
  if (kind_ == Kind::unit) return "unit";
  std::ostringstream os;
  if (kind_ == Kind::constant_vector) {
    os << "const:" << values_[0];
    return os.str();
  }
  os << "perm:";
  for (size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
  return os.str();
}

WeightedTree grow_bary(int64_t n, int b, const WeightSampler& sampler, Philox4x32& rng) {
  if (n < 1) throw std::invalid_argument("grow_bary: n must be >= 1");
  if (b < 2) throw std::invalid_argument("grow_bary: b must be >= 2");
  if (sampler.b() != b) throw std::invalid_argument("grow_bary: sampler arity mismatch");

  WeightedTree tree;
  tree.b = b;
  tree.parent.assign(1, -1);
  tree.slot.assign(1, -1);
  tree.weight.assign(1, 0.0);
  if (n == 1) return tree;

  tree.parent.reserve(n);
  tree.slot.reserve(n);
  tree.weight.reserve(n);

  std::vector<double> z(static_cast<size_t>(n) * b, 0.0);
  std::vector<uint8_t> drawn(n, 0);
  // Free slots packed as node * b + slot.
  std::vector<int64_t> externals;
  externals.reserve(static_cast<size_t>(n - 1) * (b - 1) + b);
  for (int s = 0; s < b; ++s) externals.push_back(s);

  for (int64_t k = 1; k < n; ++k) {
    const size_t pick = static_cast<size_t>(rng.next_below(externals.size()));
    const int64_t packed = externals[pick];
    externals[pick] = externals.back();
    externals.pop_back();
    const int64_t p = packed / b;
    const int s = static_cast<int>(packed % b);
    if (!drawn[p]) {
      sampler.draw(rng, &z[p * b]);
      drawn[p] = 1;
    }
    tree.parent.push_back(static_cast<int32_t>(p));
    tree.slot.push_back(static_cast<int8_t>(s));
    tree.weight.push_back(z[p * b + s]);
    for (int t = 0; t < b; ++t) externals.push_back(k * b + t);
  }

  if (drawn[0]) tree.root_weights.assign(z.begin(), z.begin() + b);
  return tree;
}

WeightedTree grow_linear(int64_t n, double beta, Philox4x32& rng) {
  if (n < 1) throw std::invalid_argument("grow_linear: n must be >= 1");
  if (!(beta >= 0)) throw std::invalid_argument("grow_linear: beta must be nonnegative");

  WeightedTree tree;
  tree.b = 0;
  tree.parent.assign(1, -1);
  tree.slot.assign(1, -1);
  tree.weight.assign(1, 0.0);
  if (n == 1) return tree;

  tree.parent.reserve(n);
  tree.slot.reserve(n);
  tree.weight.reserve(n);

  FenwickSum weights(static_cast<size_t>(n));
  weights.add(0, 1.0);
  for (int64_t k = 1; k < n; ++k) {
    const double r = rng.next_double() * weights.total();
    const size_t u = weights.find(r, static_cast<size_t>(k));
    tree.parent.push_back(static_cast<int32_t>(u));
    tree.slot.push_back(-1);
    tree.weight.push_back(1.0);
    weights.add(u, beta);  // deg(u) grew by one
    weights.add(static_cast<size_t>(k), 1.0);
  }
  return tree;
}

void validate_tree(const WeightedTree& tree) {
  const int64_t n = tree.size();
  if (n < 1 || tree.parent[0] != -1) throw std::logic_error("validate_tree: bad root");
  std::vector<int> child_slots_seen;
  for (int64_t k = 1; k < n; ++k) {
    const int32_t p = tree.parent[k];
    if (p < 0 || p >= k) throw std::logic_error("validate_tree: labels must increase along paths");
    if (!(tree.weight[k] >= 0)) throw std::logic_error("validate_tree: negative edge weight");
    if (tree.b > 0 && (tree.slot[k] < 0 || tree.slot[k] >= tree.b)) {
      throw std::logic_error("validate_tree: slot out of range");
    }
  }
  if (tree.b > 0) {
    std::vector<uint8_t> used(static_cast<size_t>(n) * tree.b, 0);
    for (int64_t k = 1; k < n; ++k) {
      auto& flag = used[static_cast<size_t>(tree.parent[k]) * tree.b + tree.slot[k]];
      if (flag) throw std::logic_error("validate_tree: duplicate slot under one parent");
      flag = 1;
    }
  }
}

}  // namespace treetail
