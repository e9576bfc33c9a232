#pragma once

#include <functional>

namespace treetail {

// The two transcendental constants behind the piecewise bound, plus the
// tolerance they were solved to. Computed once and passed by value; there is
// no global state.
struct Constants {
  double gamma;      // positive solution of e^{2/g} - 2/g = 12/7, ~2.0047
  double l0;         // largest root of e^L = 6 L^2, ~5.0177
  double tolerance;  // residual bound requested at solve time
};

// Residuals of the defining equations (zero at the exact roots).
double gamma_residual(double g);
double l0_residual(double l);

// Deterministic bisection on fixed brackets ([1.5,2.5] and [4,6]); the
// brackets are sign-scanned at solve time to confirm a single monotone
// crossing. Roots are refined to machine precision, so any tolerance down to
// ~1e-12 is honored.
double solve_gamma(double tolerance);
double solve_l0(double tolerance);
Constants solve_constants(double tolerance = 1e-12);

// Integral of exp(-c * u * (1-u)) over u in [0,1], to absolute accuracy 1e-12
// (adaptive Simpson; no special functions). c >= 0.
double exp_neg_quadratic_mean(double c);

// The biquadratic certificate
//   f(s) = D^2 g^2 (5/7 - 5/6 + (5/12 - 25/42)(D g s)^2 + (25/84)(D g s)^4)
// which is <= 0 exactly on [0, 1/(g D)] and vanishes at the right endpoint.
double small_s_certificate(const Constants& k, double s_norm, double d_bound);

// (1 - exp(-x))/x, continuous at 0; accurate for small x via expm1.
double exp_decay_ratio(double x);

// Adaptive Simpson quadrature with an absolute error target.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol);

}  // namespace treetail
