#include "treetail/recursion_core.hpp"

#include <cmath>
#include <stdexcept>

namespace treetail {

CoeffMatrix coeff_matrix(int64_t i, int64_t n) {
  if (n < 1) throw std::invalid_argument("coeff_matrix: n must be >= 1");
  if (i < 0 || i >= n) throw std::invalid_argument("coeff_matrix: need 0 <= i <= n-1");
  const double x = static_cast<double>(i) / static_cast<double>(n);
  CoeffMatrix m;
  m.x = x;
  m.a = {{{x * x, x * (1.0 - x)}, {0.0, x}}};
  return m;
}

double opnorm_sq_formula(double x) {
  const double x2 = x * x;
  return x2 * x2 + (x2 - x2 * x) * (1.0 + std::sqrt(x2 + 1.0));
}

double opnorm_sq_eigen(const CoeffMatrix& m) {
  // Largest eigenvalue of the symmetric matrix A^T A.
  const auto& a = m.a;
  const double g00 = a[0][0] * a[0][0] + a[1][0] * a[1][0];
  const double g01 = a[0][0] * a[0][1] + a[1][0] * a[1][1];
  const double g11 = a[0][1] * a[0][1] + a[1][1] * a[1][1];
  const double half_trace = 0.5 * (g00 + g11);
  const double half_gap = 0.5 * (g00 - g11);
  return half_trace + std::sqrt(half_gap * half_gap + g01 * g01);
}

double op_norm_sq(const CoeffMatrix& m) {
  const double closed = opnorm_sq_formula(m.x);
  const double eigen = opnorm_sq_eigen(m);
  if (std::abs(closed - eigen) > 1e-12) {
    throw std::logic_error("op_norm_sq: closed form and eigenvalue route disagree");
  }
  return closed;
}

ScaledVector scaled_vector(const FunctionalPair& value, int64_t n, const ExpectationTable& table) {
  if (n > table.n_max()) throw std::invalid_argument("scaled_vector: expectation table too small");
  if (n <= 0) return ScaledVector{};
  const double dn = static_cast<double>(n);
  return ScaledVector{(value.wiener - table.wiener[n]) / (dn * dn),
                      (value.path_length - table.path[n]) / dn};
}

ScaledVector toll_residual(const WeightedTree& tree, const ExpectationTable& table) {
  if (tree.b <= 0) throw std::invalid_argument("toll_residual: b-ary tree required");
  const int64_t n = tree.size();
  if (n > table.n_max()) throw std::invalid_argument("toll_residual: expectation table too small");

  const ScaledVector x_n = scaled_vector(compute_functionals(tree), n, table);
  double dw = x_n.wiener, dp = x_n.path;
  for (const RootSubtree& sub : root_subtrees(tree)) {
    if (sub.size == 0) continue;  // A_i(0) = 0 and X_0 = 0
    const ScaledVector x_i =
        scaled_vector(FunctionalPair{sub.path_length, sub.wiener}, sub.size, table);
    const CoeffMatrix a = coeff_matrix(sub.size, n);
    dw -= a.a[0][0] * x_i.wiener + a.a[0][1] * x_i.path;
    dp -= a.a[1][1] * x_i.path;
  }
  return ScaledVector{dw, dp};
}

ScaledVector toll_main_term(const std::vector<int64_t>& split, const std::vector<double>& z,
                            int64_t n, double mu, int b) {
  if (static_cast<int>(split.size()) != b || static_cast<int>(z.size()) != b) {
    throw std::invalid_argument("toll_main_term: split and z must have b entries");
  }
  const double ratio = mu * b / (b - 1.0);
  double xlogx = 0;
  for (int i = 0; i < b; ++i) {
    const double x = static_cast<double>(split[i]) / static_cast<double>(n);
    if (x > 0) xlogx += x * std::log(x);
  }
  double pair_sum = 0, linear_sum = 0;
  for (int i = 0; i < b; ++i) {
    const double xi = static_cast<double>(split[i]) / static_cast<double>(n);
    linear_sum += z[i] * xi;
    for (int j = 0; j < b; ++j) {
      if (i == j) continue;
      const double xj = static_cast<double>(split[j]) / static_cast<double>(n);
      pair_sum += (0.5 * (z[i] + z[j]) + ratio) * xi * xj;
    }
  }
  return ScaledVector{ratio * xlogx + pair_sum, ratio * xlogx + linear_sum};
}

double norm(const ScaledVector& v) { return std::hypot(v.wiener, v.path); }

DBoundEstimate estimate_d_bound(int b, const WeightSampler& sampler, int64_t n_max,
                                int64_t samples_per_size, uint64_t seed, double safety) {
  if (samples_per_size < 1) throw std::invalid_argument("estimate_d_bound: samples must be >= 1");
  if (n_max < 2) throw std::invalid_argument("estimate_d_bound: n_max must be >= 2");

  DBoundEstimate est;
  est.safety = safety;
  est.n_max = n_max;
  est.samples_per_size = samples_per_size;
  est.seed = seed;
  for (int64_t n = 2; n <= std::min<int64_t>(n_max, 32); ++n) est.sizes.push_back(n);
  for (int64_t n = 48; n < n_max; n = n + n / 2) est.sizes.push_back(n);
  if (est.sizes.back() != n_max) est.sizes.push_back(n_max);

  const ExpectationTable table = expectations(n_max, b, sampler.mu());
  for (size_t size_index = 0; size_index < est.sizes.size(); ++size_index) {
    const int64_t n = est.sizes[size_index];
    for (int64_t s = 0; s < samples_per_size; ++s) {
      // Streams keyed by (size, sample), so a larger sample budget replays a
      // superset of the smaller one and the max is monotone in samples.
      Philox4x32 rng(seed, kDomainEstimate,
                     (static_cast<uint64_t>(size_index) << 32) | static_cast<uint64_t>(s));
      const WeightedTree tree = grow_bary(n, b, sampler, rng);
      const double d = norm(toll_residual(tree, table));
      if (d > est.raw_max) {
        est.raw_max = d;
        est.raw_max_n = n;
      }
    }
  }
  est.value = est.raw_max * safety;
  return est;
}

}  // namespace treetail
