#include "treetail/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treetail {

namespace {

// Lower regularized gamma by series expansion (x < a + 1).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma by Lentz continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0) || x < 0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_sf(double stat, double dof) {
  return regularized_gamma_q(0.5 * dof, 0.5 * stat);
}

Chi2Result chi_square_gof(const std::vector<int64_t>& observed, const std::vector<double>& probs,
                          int64_t samples, double min_expected) {
  if (observed.size() != probs.size()) {
    throw std::invalid_argument("chi_square_gof: size mismatch");
  }
  double stat = 0;
  int cells = 0;
  double pooled_expected = 0;
  int64_t pooled_observed = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(samples);
    if (expected < min_expected) {
      pooled_expected += expected;
      pooled_observed += observed[i];
      continue;
    }
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
    ++cells;
  }
  if (pooled_expected > 0) {
    const double diff = static_cast<double>(pooled_observed) - pooled_expected;
    stat += diff * diff / pooled_expected;
    ++cells;
  }
  Chi2Result result;
  result.stat = stat;
  result.dof = std::max(1, cells - 1);
  result.pvalue = chi_square_sf(stat, result.dof);
  return result;
}

Chi2Result chi_square_two_sample(const std::map<int64_t, int64_t>& a,
                                 const std::map<int64_t, int64_t>& b, double min_expected) {
  double na = 0, nb = 0;
  std::vector<int64_t> values;
  for (const auto& [v, c] : a) {
    na += static_cast<double>(c);
    values.push_back(v);
  }
  for (const auto& [v, c] : b) {
    nb += static_cast<double>(c);
    if (!a.count(v)) values.push_back(v);
  }
  std::sort(values.begin(), values.end());

  const double total = na + nb;
  struct Cell {
    double ca = 0, cb = 0, ct = 0;
  };
  std::vector<Cell> cells;
  Cell pool;
  for (int64_t v : values) {
    const auto ia = a.find(v);
    const auto ib = b.find(v);
    pool.ca += ia == a.end() ? 0 : static_cast<double>(ia->second);
    pool.cb += ib == b.end() ? 0 : static_cast<double>(ib->second);
    pool.ct = pool.ca + pool.cb;
    if (pool.ct * na / total >= min_expected && pool.ct * nb / total >= min_expected) {
      cells.push_back(pool);
      pool = Cell{};
    }
  }
  if (pool.ct > 0) {
    if (cells.empty()) {
      cells.push_back(pool);
    } else {
      // merge the under-filled remainder into the last cell
      cells.back().ca += pool.ca;
      cells.back().cb += pool.cb;
      cells.back().ct += pool.ct;
    }
  }
  double stat = 0;
  for (const Cell& cell : cells) {
    const double ea = cell.ct * na / total;
    const double eb = cell.ct * nb / total;
    stat += (cell.ca - ea) * (cell.ca - ea) / ea + (cell.cb - eb) * (cell.cb - eb) / eb;
  }
  Chi2Result result;
  result.stat = stat;
  result.dof = std::max<size_t>(1, cells.size() - 1);
  result.pvalue = chi_square_sf(stat, result.dof);
  return result;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double p = 0;
  double sign = 1;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    p += term;
    sign = -sign;
    if (std::abs(term) < 1e-16) break;
  }
  KsResult result;
  result.statistic = d;
  result.pvalue = std::min(1.0, std::max(0.0, 2.0 * p));
  return result;
}

double binomial_stderr(double p_hat, int64_t samples) {
  return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(samples));
}

}  // namespace treetail
