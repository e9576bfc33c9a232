#pragma once

#include <array>
#include <cstdint>

#include "treetail/numerics.hpp"

namespace treetail {

// The five-piece upper tail bound for one component of the scaled vector,
// parameterized by the almost-sure toll bound D. The pieces meet at
// 5*gamma*D, C, 48*D*L0 and 4*D*e^{L0}; continuity at the last breakpoint
// rests on the defining equation of L0.
struct PiecewiseBound {
  double d_bound;
  Constants constants;
  double c_threshold;                 // C = 48 D / gamma + D sqrt(48 (48/gamma^2 - 5))
  std::array<double, 4> breakpoints;  // {5 gamma D, C, 48 D L0, 4 D e^{L0}}

  static PiecewiseBound make(double d_bound, const Constants& constants);
};

// log of the bound value at t >= 0 (always <= 0; exact at breakpoints).
double log_upper_tail(double t, const PiecewiseBound& bound);

// Bound value in (0,1], clamped; 1 at t = 0. exp() may underflow to 0 for
// astronomically large t, use log_upper_tail there.
double upper_tail(double t, const PiecewiseBound& bound);

// Which of the five pieces t falls in (1-based).
int active_piece(double t, const PiecewiseBound& bound);

enum class ChernoffRegime { small, mid, large };

// Optimizer of u -> K_u u^2 - u t over the three Laplace-envelope regimes:
// the interior minimizer when it lands inside its regime, otherwise the
// regime boundary. exp(exponent) reproduces upper_tail exactly.
struct ChernoffSolution {
  double u_star;
  double exponent;
  ChernoffRegime regime;
};

ChernoffSolution chernoff_optimize(double t, const PiecewiseBound& bound);

// Laplace-transform envelope E[exp(<s,X_n>)] <= exp(log_laplace_envelope).
// Upper-semicontinuous; jumps upward at s = 1/(gamma D).
double log_laplace_envelope(double s_norm, const PiecewiseBound& bound);
double laplace_envelope(double s_norm, const PiecewiseBound& bound);

enum class AsymptoticKind { path_length, wiener, linear };

// Parameters of the n -> infinity reference curves. These evaluate the
// displayed exponentials with the o(1) terms set to zero; they are reference
// curves, not certified finite-n bounds.
struct AsymptoticBound {
  int b;
  double mu;       // E[Z_1]; unused for the linear kind
  double d_bound;
  double alpha;    // log(b mu / (4 D (b-1) e)) resp. -log(4 D (b-1) e)
  AsymptoticKind kind;

  static AsymptoticBound bary(int b, double mu, double d_bound);
  static AsymptoticBound linear_tree(int b, double d_bound);
};

// P(|F_n - E F_n| > t E F_n) reference curve; clamped to (0, 1]. n >= 3.
double asymptotic_upper(double t, int64_t n, const AsymptoticBound& params,
                        AsymptoticKind kind);

enum class LowerKind { bary, linear };

struct LowerTailValue {
  double value;
  bool o_term_caveat;  // set when n < 3814280, where the dropped O-term is not yet small
};

// Lower bound main term for the Wiener index tail, O(log^(3) n) term dropped.
LowerTailValue lower_tail_wiener(double t, int64_t n, int b, double mu, LowerKind kind);

}  // namespace treetail
