#include "treetail/tail_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treetail {

PiecewiseBound PiecewiseBound::make(double d_bound, const Constants& constants) {
  if (!(d_bound > 0)) throw std::invalid_argument("PiecewiseBound: d_bound must be positive");
  const double g = constants.gamma, l0 = constants.l0, d = d_bound;
  PiecewiseBound bound;
  bound.d_bound = d;
  bound.constants = constants;
  bound.c_threshold = 48.0 * d / g + d * std::sqrt(48.0 * (48.0 / (g * g) - 5.0));
  bound.breakpoints = {5.0 * g * d, bound.c_threshold, 48.0 * d * l0, 4.0 * d * std::exp(l0)};
  for (int i = 0; i + 1 < 4; ++i) {
    if (!(bound.breakpoints[i] < bound.breakpoints[i + 1])) {
      throw std::logic_error("PiecewiseBound: breakpoints not increasing");
    }
  }
  return bound;
}

int active_piece(double t, const PiecewiseBound& bound) {
  if (!(t >= 0)) throw std::invalid_argument("upper_tail: t must be nonnegative");
  const auto& bp = bound.breakpoints;
  if (t <= bp[0]) return 1;
  if (t <= bp[1]) return 2;
  if (t <= bp[2]) return 3;
  if (t <= bp[3]) return 4;
  return 5;
}

double log_upper_tail(double t, const PiecewiseBound& bound) {
  const double d = bound.d_bound, g = bound.constants.gamma, l0 = bound.constants.l0;
  switch (active_piece(t, bound)) {
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

double upper_tail(double t, const PiecewiseBound& bound) {
  return std::min(1.0, std::exp(log_upper_tail(t, bound)));
}

ChernoffSolution chernoff_optimize(double t, const PiecewiseBound& bound) {
  if (!(t > 0)) throw std::invalid_argument("chernoff_optimize: t must be positive");
  const double d = bound.d_bound, g = bound.constants.gamma, l0 = bound.constants.l0;
  ChernoffSolution sol;
  switch (active_piece(t, bound)) {
    case 1:  // interior minimizer of the small regime
      sol.u_star = t / (5.0 * d * d * g * g);
      sol.exponent = 2.5 * g * g * d * d * sol.u_star * sol.u_star - sol.u_star * t;
      sol.regime = ChernoffRegime::small;
      break;
    case 2:  // small-regime boundary
      sol.u_star = 1.0 / (g * d);
      sol.exponent = 2.5 * g * g * d * d * sol.u_star * sol.u_star - sol.u_star * t;
      sol.regime = ChernoffRegime::small;
      break;
    case 3:  // interior minimizer of the mid regime
      sol.u_star = t / (48.0 * d * d);
      sol.exponent = 24.0 * d * d * sol.u_star * sol.u_star - sol.u_star * t;
      sol.regime = ChernoffRegime::mid;
      break;
    case 4:  // mid-regime boundary
      sol.u_star = l0 / d;
      sol.exponent = 24.0 * d * d * sol.u_star * sol.u_star - sol.u_star * t;
      sol.regime = ChernoffRegime::mid;
      break;
    default:  // interior minimizer of the large regime
      sol.u_star = std::log(t / (4.0 * d)) / d;
      sol.exponent =
          4.0 * std::exp(d * sol.u_star) - sol.u_star * t;  // K_u u^2 with K_u = 4 e^{Du}/u^2
      sol.regime = ChernoffRegime::large;
      break;
  }
  return sol;
}

double log_laplace_envelope(double s_norm, const PiecewiseBound& bound) {
  if (!(s_norm >= 0)) throw std::invalid_argument("laplace_envelope: s_norm must be nonnegative");
  const double d = bound.d_bound, g = bound.constants.gamma, l0 = bound.constants.l0;
  if (s_norm <= 1.0 / (g * d)) return 2.5 * g * g * d * d * s_norm * s_norm;
  if (s_norm <= l0 / d) return 24.0 * d * d * s_norm * s_norm;
  return 4.0 * std::exp(d * s_norm);
}

double laplace_envelope(double s_norm, const PiecewiseBound& bound) {
  return std::exp(log_laplace_envelope(s_norm, bound));
}

AsymptoticBound AsymptoticBound::bary(int b, double mu, double d_bound) {
  if (b < 2) throw std::invalid_argument("AsymptoticBound: b must be >= 2");
  if (!(mu >= 0) || !(d_bound > 0)) throw std::invalid_argument("AsymptoticBound: bad parameters");
  const double alpha = std::log(b * mu / (4.0 * d_bound * (b - 1) * std::exp(1.0)));
  return AsymptoticBound{b, mu, d_bound, alpha, AsymptoticKind::path_length};
}

AsymptoticBound AsymptoticBound::linear_tree(int b, double d_bound) {
  if (b < 2) throw std::invalid_argument("AsymptoticBound: b must be >= 2");
  if (!(d_bound > 0)) throw std::invalid_argument("AsymptoticBound: bad parameters");
  const double alpha = -std::log(4.0 * d_bound * (b - 1) * std::exp(1.0));
  return AsymptoticBound{b, 0.0, d_bound, alpha, AsymptoticKind::linear};
}

double asymptotic_upper(double t, int64_t n, const AsymptoticBound& params, AsymptoticKind kind) {
  if (n < 3) throw std::invalid_argument("asymptotic_upper: n must be >= 3");
  if (!(t > 0)) throw std::invalid_argument("asymptotic_upper: t must be positive");
  const bool linear = kind == AsymptoticKind::linear;
  if (linear != (params.kind == AsymptoticKind::linear)) {
    throw std::invalid_argument("asymptotic_upper: kind does not match parameters");
  }
  const double logn = std::log(static_cast<double>(n));
  const double inner = std::log(logn) + std::log(t) + params.alpha;
  const double prefactor = linear ? 1.0 / ((params.b - 1) * params.d_bound)
                                  : (params.b / (params.b - 1.0)) * params.mu / params.d_bound;
  const double exponent = -prefactor * t * logn * inner;
  return std::min(1.0, std::exp(exponent));
}

LowerTailValue lower_tail_wiener(double t, int64_t n, int b, double mu, LowerKind kind) {
  if (b < 2) throw std::invalid_argument("lower_tail_wiener: b must be >= 2");
  if (n < 3) throw std::invalid_argument("lower_tail_wiener: n must be >= 3");
  if (!(t >= 0)) throw std::invalid_argument("lower_tail_wiener: t must be nonnegative");
  const double logn = std::log(static_cast<double>(n));
  const double loglogn = std::log(logn);
  const double prefactor =
      kind == LowerKind::bary ? 4.0 * (b / (b - 1.0)) * mu : 4.0 / (b - 1.0);
  const double value = std::min(1.0, std::exp(-prefactor * t * logn * loglogn));
  return LowerTailValue{value, n < 3814280};
}

}  // namespace treetail
