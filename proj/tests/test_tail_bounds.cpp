#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "treetail/rng.hpp"
#include "treetail/tail_bounds.hpp"

using namespace treetail;

namespace {

// Independent evaluation of the five piece formulas; used as the oracle for
// continuity and agreement checks.
double piece_log(int piece, double t, double d, double g, double l0) {
  switch (piece) {
    case 1:
      return -t * t / (10.0 * g * g * d * d);
    case 2:
      return 2.5 - t / (g * d);
    case 3:
      return -t * t / (96.0 * d * d);
    case 4:
      return 24.0 * l0 * l0 - l0 * t / d;
    default:
      return t / d - (t / d) * std::log(t / (4.0 * d));
  }
}

}  // namespace

TEST_CASE("value one at t = 0 and the first two pieces meet at exp(-5/2)") {
  const Constants k = solve_constants();
  const PiecewiseBound bound = PiecewiseBound::make(1.0, k);
  CHECK(upper_tail(0.0, bound) == 1.0);

  const double t = 5.0 * k.gamma;
  const double p1 = std::exp(piece_log(1, t, 1.0, k.gamma, k.l0));
  const double p2 = std::exp(piece_log(2, t, 1.0, k.gamma, k.l0));
  CHECK(p1 == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
  CHECK(p2 == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
  CHECK(upper_tail(t, bound) == doctest::Approx(0.0820849986238988).epsilon(1e-10));
}

TEST_CASE("second breakpoint matches its closed form, about 42.20 for D = 1") {
  const Constants k = solve_constants();
  const PiecewiseBound bound = PiecewiseBound::make(1.0, k);
  const double oracle = 48.0 / k.gamma + std::sqrt(48.0 * (48.0 / (k.gamma * k.gamma) - 5.0));
  CHECK(bound.c_threshold == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(std::abs(bound.c_threshold - 42.20) <= 0.01);
}

TEST_CASE("adjacent pieces agree at every breakpoint") {
  const Constants k = solve_constants();
  for (const double d : {0.5, 1.0, 2.0}) {
    const PiecewiseBound bound = PiecewiseBound::make(d, k);
    for (int i = 0; i < 4; ++i) {
      const double t = bound.breakpoints[i];
      const double left = piece_log(i + 1, t, d, k.gamma, k.l0);
      const double right = piece_log(i + 2, t, d, k.gamma, k.l0);
      // |log l - log r| <= 1e-9 is the relative gap of the values; the
      // values themselves underflow at the outer breakpoints
      REQUIRE(std::abs(left - right) <= 1e-9);
    }
  }
}

TEST_CASE("log bound decreases strictly along a log grid") {
  const Constants k = solve_constants();
  for (const double d : {0.5, 1.0, 2.0}) {
    const PiecewiseBound bound = PiecewiseBound::make(d, k);
    double prev = 0.0;  // log value at t = 0
    const double lo = std::log(1e-5 * d), hi = std::log(1e5 * d);
    for (int i = 0; i < 10000; ++i) {
      const double t = std::exp(lo + (hi - lo) * i / 9999.0);
      const double value = log_upper_tail(t, bound);
      REQUIRE(value < prev);
      prev = value;
    }
  }
}

TEST_CASE("chernoff optimizer reproduces the piecewise bound") {
  const Constants k = solve_constants();
  Philox4x32 rng(2024, kDomainTest, 1);
  for (const double d : {0.5, 1.0, 2.0}) {
    const PiecewiseBound bound = PiecewiseBound::make(d, k);
    for (int i = 0; i < 1000; ++i) {
      const double t = d * std::exp(std::log(1e-3) + rng.next_double() * std::log(1e7));
      const ChernoffSolution sol = chernoff_optimize(t, bound);
      const double log_bound = log_upper_tail(t, bound);
      REQUIRE(std::abs(sol.exponent - log_bound) <= 1e-9 * std::max(1.0, std::abs(log_bound)));
    }
  }
}

TEST_CASE("chernoff optimizer is minimal among the proof's candidates") {
  const Constants k = solve_constants();
  const PiecewiseBound bound = PiecewiseBound::make(1.0, k);
  const double boundary_small = 1.0 / k.gamma;
  const double boundary_mid = k.l0;
  auto value_at = [&](double u, double t) {
    double ku;
    if (u <= boundary_small) {
      ku = 2.5 * k.gamma * k.gamma;
    } else if (u <= boundary_mid) {
      ku = 24.0;
    } else {
      ku = 4.0 * std::exp(u) / (u * u);
    }
    return ku * u * u - u * t;
  };
  for (const double t : {0.3, 3.0, 11.0, 60.0, 300.0, 500.0, 1000.0}) {
    const ChernoffSolution sol = chernoff_optimize(t, bound);
    for (const double u : {0.01, boundary_small, 1.0, 3.0, boundary_mid, 6.0, 8.0}) {
      REQUIRE(sol.exponent <= value_at(u, t) + 1e-9);
    }
  }
}

TEST_CASE("chernoff examples for D = 1") {
  const Constants k = solve_constants();
  const PiecewiseBound bound = PiecewiseBound::make(1.0, k);

  const ChernoffSolution small = chernoff_optimize(1.0, bound);
  CHECK(small.regime == ChernoffRegime::small);
  CHECK(small.u_star == doctest::Approx(1.0 / (5.0 * k.gamma * k.gamma)).epsilon(1e-12));
  CHECK(std::abs(small.u_star - 0.0498) <= 1e-3);
  CHECK(small.exponent == doctest::Approx(-1.0 / (10.0 * k.gamma * k.gamma)).epsilon(1e-12));
  CHECK(std::abs(small.exponent + 0.0249) <= 1e-3);

  const ChernoffSolution mid = chernoff_optimize(20.0, bound);  // t in (5 gamma, C]
  CHECK(mid.regime == ChernoffRegime::small);
  CHECK(mid.u_star == doctest::Approx(1.0 / k.gamma).epsilon(1e-12));
  CHECK(mid.exponent == doctest::Approx(2.5 - 20.0 / k.gamma).epsilon(1e-12));

  const double t_edge = 4.0 * std::exp(k.l0);
  const ChernoffSolution edge = chernoff_optimize(t_edge, bound);
  CHECK(edge.u_star == doctest::Approx(k.l0).epsilon(1e-9));
  CHECK(std::exp(edge.exponent) ==
        doctest::Approx(upper_tail(t_edge, bound)).epsilon(1e-9));
}

TEST_CASE("bound depends on t only through t/D") {
  const Constants k = solve_constants();
  const PiecewiseBound unit = PiecewiseBound::make(1.0, k);
  for (const double c : {0.5, 2.0, 7.3}) {
    const PiecewiseBound scaled = PiecewiseBound::make(c, k);
    for (const double t : {0.1, 1.0, 15.0, 100.0, 700.0}) {
      REQUIRE(log_upper_tail(c * t, scaled) ==
              doctest::Approx(log_upper_tail(t, unit)).epsilon(1e-12));
    }
  }
}

TEST_CASE("laplace envelope pieces and the upward jump") {
  const Constants k = solve_constants();
  const PiecewiseBound bound = PiecewiseBound::make(1.0, k);
  CHECK(laplace_envelope(0.0, bound) == 1.0);

  const double s_jump = 1.0 / k.gamma;
  const double left = log_laplace_envelope(s_jump, bound);
  const double right = log_laplace_envelope(std::nextafter(s_jump, 1e9), bound);
  CHECK(left == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(right == doctest::Approx(24.0 / (k.gamma * k.gamma)).epsilon(1e-9));
  CHECK(right > left);

  // mid and large pieces agree at s = L0/D via e^{L0} = 6 L0^2
  const double s_edge = k.l0;
  const double mid = 24.0 * s_edge * s_edge;
  const double large = 4.0 * std::exp(s_edge);
  CHECK(log_laplace_envelope(s_edge, bound) == doctest::Approx(mid).epsilon(1e-12));
  CHECK(mid == doctest::Approx(large).epsilon(1e-9));
}

TEST_CASE("asymptotic reference curve, b-ary") {
  const AsymptoticBound params = AsymptoticBound::bary(2, 1.0, 1.0);
  CHECK(params.alpha == doctest::Approx(std::log(1.0 / (2.0 * std::exp(1.0)))).epsilon(1e-12));

  const double logn = std::log(16.0);
  const double exponent = -2.0 * logn * (std::log(logn) + std::log(1.0) + params.alpha);
  const double expected = std::min(1.0, std::exp(exponent));
  CHECK(asymptotic_upper(1.0, 16, params, AsymptoticKind::path_length) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(asymptotic_upper(1.0, 16, params, AsymptoticKind::wiener) ==
        doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(asymptotic_upper(1.0, 2, params, AsymptoticKind::path_length),
                  std::invalid_argument);
  // log t -> -infinity flips the exponent sign; the probability clamps at 1
  CHECK(asymptotic_upper(1e-9, 100, params, AsymptoticKind::path_length) == 1.0);
}

TEST_CASE("asymptotic reference curve, linear") {
  // alpha = -log(4 D (b-1) e): 4e for b = 2, 8e for b = 3
  const AsymptoticBound params = AsymptoticBound::linear_tree(2, 1.0);
  CHECK(params.alpha == doctest::Approx(-std::log(4.0 * std::exp(1.0))).epsilon(1e-12));
  CHECK(AsymptoticBound::linear_tree(3, 1.0).alpha ==
        doctest::Approx(-std::log(8.0 * std::exp(1.0))).epsilon(1e-12));
  const double logn = std::log(1000.0);
  const double exponent = -1.0 * 3.0 * logn * (std::log(logn) + std::log(3.0) + params.alpha);
  CHECK(asymptotic_upper(3.0, 1000, params, AsymptoticKind::linear) ==
        doctest::Approx(std::min(1.0, std::exp(exponent))).epsilon(1e-12));
  CHECK_THROWS_AS(asymptotic_upper(1.0, 1000, params, AsymptoticKind::path_length),
                  std::invalid_argument);
}

TEST_CASE("lower tail main term") {
  const double logn = std::log(1e6), loglogn = std::log(logn);
  const LowerTailValue bary = lower_tail_wiener(1.0, 1000000, 2, 1.0, LowerKind::bary);
  CHECK(bary.value == doctest::Approx(std::exp(-8.0 * logn * loglogn)).epsilon(1e-12));
  CHECK(bary.o_term_caveat);

  const LowerTailValue linear = lower_tail_wiener(0.5, 4000000, 3, 1.0, LowerKind::linear);
  const double ln = std::log(4e6);
  CHECK(linear.value == doctest::Approx(std::exp(-2.0 * 0.5 * ln * std::log(ln))).epsilon(1e-12));
  CHECK_FALSE(linear.o_term_caveat);

  CHECK(lower_tail_wiener(0.0, 1000, 2, 1.0, LowerKind::bary).value == 1.0);
  CHECK_THROWS_AS(lower_tail_wiener(1.0, 1000, 1, 1.0, LowerKind::bary), std::invalid_argument);
}
