#include "treetail/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace treetail {

namespace {

// Bisection on [lo, hi]. Requires a single sign change; a 64-point sign scan
// guards the bracket before iterating. Refines to machine precision.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) throw std::logic_error("bisect: endpoints have equal sign");

  int changes = 0;
  double prev = flo;
  for (int i = 1; i <= 64; ++i) {
    const double x = lo + (hi - lo) * i / 64.0;
    const double fx = f(x);
    if ((prev > 0) != (fx > 0)) ++changes;
    prev = fx;
  }
  if (changes != 1) throw std::logic_error("bisect: bracket is not a single monotone crossing");

  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                double fb, double fm, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double gamma_residual(double g) { return std::exp(2.0 / g) - 2.0 / g - 12.0 / 7.0; }

double l0_residual(double l) { return std::exp(l) - 6.0 * l * l; }

double solve_gamma(double tolerance) {
  if (!(tolerance > 0)) throw std::invalid_argument("solve_gamma: tolerance must be positive");
  return bisect(gamma_residual, 1.5, 2.5);
}

double solve_l0(double tolerance) {
  if (!(tolerance > 0)) throw std::invalid_argument("solve_l0: tolerance must be positive");
  return bisect(l0_residual, 4.0, 6.0);
}

Constants solve_constants(double tolerance) {
  return Constants{solve_gamma(tolerance), solve_l0(tolerance), tolerance};
}

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  // Eight initial panels so narrow features near the endpoints are seen
  // before adaptivity takes over.
  const int panels = 8;
  double total = 0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + (b - a) * i / panels;
    const double x1 = a + (b - a) * (i + 1) / panels;
    const double xm = 0.5 * (x0 + x1);
    const double f0 = f(x0), f1 = f(x1), fm = f(xm);
    const double whole = simpson(x0, f0, x1, f1, fm);
    total += adaptive(f, x0, f0, x1, f1, fm, whole, abs_tol / panels, 60);
  }
  return total;
}

double exp_neg_quadratic_mean(double c) {
  if (!(c >= 0)) throw std::invalid_argument("exp_neg_quadratic_mean: c must be nonnegative");
  if (c == 0) return 1.0;
  return integrate([c](double u) { return std::exp(-c * u * (1.0 - u)); }, 0.0, 1.0, 1e-12);
}

double small_s_certificate(const Constants& k, double s_norm, double d_bound) {
  if (!(s_norm >= 0)) throw std::invalid_argument("small_s_certificate: s_norm must be nonnegative");
  const double dg = d_bound * k.gamma;
  const double q = dg * s_norm;
  const double q2 = q * q;
  return dg * dg *
         (5.0 / 7.0 - 5.0 / 6.0 + (5.0 / 12.0 - 25.0 / 42.0) * q2 + (25.0 / 84.0) * q2 * q2);
}

double exp_decay_ratio(double x) {
  if (x == 0) return 1.0;
  return -std::expm1(-x) / x;
}

}  // namespace treetail
