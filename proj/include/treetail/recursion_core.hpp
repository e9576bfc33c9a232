#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "treetail/exact_engine.hpp"
#include "treetail/functionals.hpp"
#include "treetail/tree_models.hpp"

namespace treetail {

// Coefficient matrix of one subtree in the two-dimensional (W, P) recursion,
//   A = [[ x^2, x (1-x) ],
//        [  0 ,   x     ]]   with x = i/n.
struct CoeffMatrix {
  double x = 0;
  std::array<std::array<double, 2>, 2> a{};
};

CoeffMatrix coeff_matrix(int64_t i, int64_t n);

// Squared operator norm of A in closed form,
//   f(x) = x^4 + (x^2 - x^3)(1 + sqrt(x^2 + 1)),
// and via the symmetric 2x2 eigenvalue formula for A^T A. op_norm_sq
// evaluates both routes and insists they agree to 1e-12.
double opnorm_sq_formula(double x);
double opnorm_sq_eigen(const CoeffMatrix& m);
double op_norm_sq(const CoeffMatrix& m);

// The scaled functional vector X_n = ((W_n - E W_n)/n^2, (P_n - E P_n)/n).
struct ScaledVector {
  double wiener = 0;
  double path = 0;
};

ScaledVector scaled_vector(const FunctionalPair& value, int64_t n, const ExpectationTable& table);

// Exact per-sample toll of the recursion: d = X_n - sum_i A_i(I_n) X^{(i)},
// with each subtree vector centered by the exact expectation table. With
// exact centering E[d] = 0 holds by construction, and d absorbs every term
// the asymptotic toll expressions leave unstated.
ScaledVector toll_residual(const WeightedTree& tree, const ExpectationTable& table);

// The displayed leading terms of the toll (asymptotic; for diagnostics only):
//   d_1 = (b/(b-1)) mu sum_i x_i log x_i
//         + sum_{i != j} ((Z_i+Z_j)/2 + (b/(b-1)) mu) x_i x_j
//   d_2 = (b/(b-1)) mu sum_i x_i log x_i + sum_i Z_i x_i
// with x_i = I_i/n and the pair sum over ordered pairs.
ScaledVector toll_main_term(const std::vector<int64_t>& split, const std::vector<double>& z,
                            int64_t n, double mu, int b);

double norm(const ScaledVector& v);

// Empirical bound on ||d|| over a schedule of sizes up to n_max (all small
// sizes, then geometric steps), `samples_per_size` trees each, times a
// safety factor. An estimator with provenance, not a proof.
struct DBoundEstimate {
  double value = 0;
  double raw_max = 0;
  int64_t raw_max_n = 0;
  double safety = 1.1;
  int64_t n_max = 0;
  int64_t samples_per_size = 0;
  uint64_t seed = 0;
  std::vector<int64_t> sizes;
};

DBoundEstimate estimate_d_bound(int b, const WeightSampler& sampler, int64_t n_max,
                                int64_t samples_per_size, uint64_t seed, double safety = 1.1);

}  // namespace treetail
