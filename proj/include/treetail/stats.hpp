#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace treetail {

// Regularized upper incomplete gamma Q(a, x) (series / continued fraction).
double regularized_gamma_q(double a, double x);

// Survival function of the chi-square distribution with dof degrees.
double chi_square_sf(double stat, double dof);

struct Chi2Result {
  double stat = 0;
  double dof = 0;
  double pvalue = 1;
};

// Pearson test of observed counts against exact probabilities. Atoms with
// expected count below min_expected are pooled into one cell.
Chi2Result chi_square_gof(const std::vector<int64_t>& observed,
                          const std::vector<double>& probs, int64_t samples,
                          double min_expected = 10.0);

// Homogeneity test of two integer-valued samples given as value -> count
// maps; cells are pooled until every expected count is >= min_expected.
Chi2Result chi_square_two_sample(const std::map<int64_t, int64_t>& a,
                                 const std::map<int64_t, int64_t>& b,
                                 double min_expected = 10.0);

// Two-sample Kolmogorov-Smirnov test (asymptotic p-value). Sorts copies.
struct KsResult {
  double statistic = 0;
  double pvalue = 1;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double binomial_stderr(double p_hat, int64_t samples);

}  // namespace treetail
