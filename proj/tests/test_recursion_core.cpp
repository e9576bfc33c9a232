#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "treetail/recursion_core.hpp"

using namespace treetail;

TEST_CASE("coefficient matrix entries") {
  const CoeffMatrix m = coeff_matrix(3, 7);
  CHECK(m.a[0][0] == doctest::Approx(9.0 / 49.0).epsilon(1e-15));
  CHECK(m.a[0][1] == doctest::Approx(12.0 / 49.0).epsilon(1e-15));
  CHECK(m.a[1][0] == 0.0);
  CHECK(m.a[1][1] == doctest::Approx(3.0 / 7.0).epsilon(1e-15));

  const CoeffMatrix zero = coeff_matrix(0, 5);
  CHECK(op_norm_sq(zero) == 0.0);
  CHECK_THROWS_AS(coeff_matrix(5, 5), std::invalid_argument);
  CHECK_THROWS_AS(coeff_matrix(-1, 5), std::invalid_argument);
}

TEST_CASE("closed form operator norm at landmark points") {
  CHECK(opnorm_sq_formula(0.0) == 0.0);
  CHECK(opnorm_sq_formula(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // f(1/2) = 1/16 + (1/8)(1 + sqrt(5)/2)
  CHECK(opnorm_sq_formula(0.5) == doctest::Approx(0.32725424859373686).epsilon(1e-14));
  const CoeffMatrix half = coeff_matrix(1, 2);
  CHECK(opnorm_sq_eigen(half) == doctest::Approx(0.32725424859373686).epsilon(1e-12));
}

TEST_CASE("closed form equals the eigenvalue route for all i <= n <= 200") {
  double worst = 0;
  for (int64_t n = 1; n <= 200; ++n) {
    for (int64_t i = 0; i < n; ++i) {
      const CoeffMatrix m = coeff_matrix(i, n);
      worst = std::max(worst, std::abs(opnorm_sq_formula(m.x) - opnorm_sq_eigen(m)));
      REQUIRE(op_norm_sq(m) < 1.0);  // strict since i/n < 1; also runs the agreement check
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("norm function is convex on [0,1]") {
  const double h = 1e-4;
  for (int i = 1; i < 10000; ++i) {
    const double x = i / 10000.0 * (1.0 - 2 * h) + h;
    const double second =
        (opnorm_sq_formula(x + h) - 2.0 * opnorm_sq_formula(x) + opnorm_sq_formula(x - h)) /
        (h * h);
    REQUIRE(second >= -1e-9);
  }
}

TEST_CASE("per-sample norm sums stay below one") {
  Philox4x32 rng(31, kDomainTest, 0);
  for (const int b : {2, 3, 4}) {
    const WeightSampler sampler = WeightSampler::unit(b);
    for (int rep = 0; rep < 200; ++rep) {
      const int64_t n = 2 + static_cast<int64_t>(rng.next_below(100));
      const auto split = root_split(grow_bary(n, b, sampler, rng));
      double sum = 0;
      for (int64_t part : split) sum += opnorm_sq_formula(static_cast<double>(part) / n);
      REQUIRE(sum <= 1.0);
    }
  }
}

TEST_CASE("toll residual degenerate cases") {
  const ExpectationTable table = expectations(4, 2, 1.0);
  Philox4x32 rng(32, kDomainTest, 0);

  const WeightedTree one = grow_bary(1, 2, WeightSampler::unit(2), rng);
  const ScaledVector d1 = toll_residual(one, table);
  CHECK(d1.wiener == 0.0);
  CHECK(d1.path == 0.0);

  // n = 2, unit weights: P_2 = W_2 = 1 deterministically and E matches, so d = 0
  const WeightedTree two = grow_bary(2, 2, WeightSampler::unit(2), rng);
  const ScaledVector d2 = toll_residual(two, table);
  CHECK(d2.wiener == 0.0);
  CHECK(d2.path == 0.0);

  // n = 2, permutation weights: P_2 = W_2 = Z uniform on {0,1}, centering by 1/2
  const ExpectationTable half = expectations(4, 2, 0.5);
  const WeightSampler perm = WeightSampler::permutation({1.0, 0.0});
  const double expected = 0.5 * std::hypot(0.25, 0.5);
  for (int64_t r = 0; r < 20; ++r) {
    Philox4x32 stream(33, kDomainTest, r);
    const WeightedTree tree = grow_bary(2, 2, perm, stream);
    REQUIRE(norm(toll_residual(tree, half)) == doctest::Approx(expected).epsilon(1e-12));
  }

  CHECK_THROWS_AS(toll_residual(grow_bary(6, 2, WeightSampler::unit(2), rng), table),
                  std::invalid_argument);
  CHECK_THROWS_AS(toll_residual(grow_linear(3, 0.0, rng), table), std::invalid_argument);
}

TEST_CASE("toll residual is centered") {
  const int64_t n = 100, samples = 20000;
  const WeightSampler sampler = WeightSampler::unit(2);
  const ExpectationTable table = expectations(n, 2, 1.0);
  double sum_w = 0, sum_p = 0, sq_w = 0, sq_p = 0;
  for (int64_t r = 0; r < samples; ++r) {
    Philox4x32 rng(34, kDomainTest, r);
    const ScaledVector d = toll_residual(grow_bary(n, 2, sampler, rng), table);
    sum_w += d.wiener;
    sum_p += d.path;
    sq_w += d.wiener * d.wiener;
    sq_p += d.path * d.path;
  }
  const double mean_w = sum_w / samples, mean_p = sum_p / samples;
  const double se_w = std::sqrt((sq_w / samples - mean_w * mean_w) / samples);
  const double se_p = std::sqrt((sq_p / samples - mean_p * mean_p) / samples);
  CHECK(std::abs(mean_w) <= 4.0 * se_w);
  CHECK(std::abs(mean_p) <= 4.0 * se_p);
}

TEST_CASE("main-term gap shrinks as n grows") {
  const WeightSampler sampler = WeightSampler::unit(2);
  auto mean_gap = [&](int64_t n, int64_t samples) {
    const ExpectationTable table = expectations(n, 2, 1.0);
    double total = 0;
    for (int64_t r = 0; r < samples; ++r) {
      Philox4x32 rng(35, kDomainTest, r);
      const WeightedTree tree = grow_bary(n, 2, sampler, rng);
      const ScaledVector d = toll_residual(tree, table);
      const ScaledVector main =
          toll_main_term(root_split(tree), tree.root_weights, n, 1.0, 2);
      total += norm(ScaledVector{d.wiener - main.wiener, d.path - main.path});
    }
    return total / static_cast<double>(samples);
  };
  CHECK(mean_gap(2000, 100) < mean_gap(20, 100));
}

TEST_CASE("residual norm stays bounded at large n") {
  // A scaling error in the coefficient matrices would make ||d|| grow with n;
  // for the classic binary unit case it stays below 1.
  const int64_t n = 2000;
  const WeightSampler sampler = WeightSampler::unit(2);
  const ExpectationTable table = expectations(n, 2, 1.0);
  double max_norm = 0;
  for (int64_t r = 0; r < 100; ++r) {
    Philox4x32 rng(36, kDomainTest, r);
    max_norm = std::max(max_norm, norm(toll_residual(grow_bary(n, 2, sampler, rng), table)));
  }
  CHECK(max_norm <= 1.1);
  CHECK(max_norm > 0.01);
}

TEST_CASE("d-bound estimator") {
  const WeightSampler sampler = WeightSampler::unit(2);
  const DBoundEstimate small = estimate_d_bound(2, sampler, 128, 20, 7);
  const DBoundEstimate large = estimate_d_bound(2, sampler, 128, 60, 7);
  CHECK(small.value == doctest::Approx(1.1 * small.raw_max).epsilon(1e-15));
  CHECK(small.raw_max <= large.raw_max);  // monotone max over a superset
  CHECK(small.sizes.front() == 2);
  CHECK(small.sizes.back() == 128);

  // binary unit case: consistent with the cited D <= 1 (statistical)
  CHECK(large.value <= 1.1);
  CHECK(large.raw_max > 0.0);
}
