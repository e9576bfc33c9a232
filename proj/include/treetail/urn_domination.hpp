#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <vector>

#include "treetail/rng.hpp"

namespace treetail {

using Rat = boost::rational<long long>;

// Drawing counts of the Polya urn PU(b): one ball per color initially, b-1
// added per draw. counts[j] is the number of times color j was drawn.
struct UrnState {
  std::vector<int32_t> counts;

  int64_t draws() const;
};

UrnState make_urn(int b);
// One draw: color j with probability (1 + counts_j (b-1)) / (b + n (b-1)).
UrnState urn_step(const UrnState& state, int b, Philox4x32& rng);

// Block multiplicity for sorted (descending) states: the size of the tie
// block at its first index, 0 elsewhere (x_{-1} = +infinity convention, so
// the largest block is always counted at index 0).
int alpha_multiplicity(const std::vector<int32_t>& sorted_x, int j);

struct KernelEntry {
  std::vector<int32_t> next;
  Rat prob;
  int lead;  // block-lead index incremented; -1 for the stay move
};

// Transition kernel of the sorted PU(b) chain; the time is the state sum.
std::vector<KernelEntry> kernel_pu(const std::vector<int32_t>& x, int b);

// Kernel of the sorted first-b view of PU(b+1) after n draws (sum x <= n).
// The stay move carries the mass of the dropped (b+1)-th color,
// (1 + (n - sum x) b) / (b + 1 + n b).
std::vector<KernelEntry> kernel_pu_plus(const std::vector<int32_t>& x, int64_t n, int b);

struct KernelPair {
  std::vector<KernelEntry> k;       // PU(b), requires sum x = n
  std::vector<KernelEntry> k_plus;  // PU(b+1) first-b view at time n
};

KernelPair kernels(const std::vector<int32_t>& x, int64_t n, int b);

// Stochastic dominance of finite laws on the componentwise partial order:
// lower <=_st upper iff lower(U) <= upper(U) for every upward-closed U.
// Checked exhaustively over subsets of the union support, in exact rationals.
bool kernel_dominated(const std::vector<KernelEntry>& lower,
                      const std::vector<KernelEntry>& upper);

// Joint simulation of sorted PU(b) (upper) and the sorted first-b view of
// PU(b+1) (lower) through a per-step monotone transport plan: tie-block
// moves of the lower chain ride the matching upper move, everything else is
// merged mass-by-mass. Preserves both marginals and keeps lower <= upper
// componentwise at every step; `ordered` reports the per-step hard check.
struct CoupledRun {
  std::vector<std::vector<int32_t>> upper;  // states after 0..n draws
  std::vector<std::vector<int32_t>> lower;
  bool ordered = true;
};

CoupledRun coupled_run(int64_t n, int b, Philox4x32& rng);

// Exact law of the sorted drawing-count vector after `draws` draws of PU(b)
// (integer path counts over one big common denominator, reduced to double).
struct SortedLaw {
  int b = 0;
  int64_t draws = 0;
  std::vector<std::pair<std::vector<int32_t>, double>> states;
};

SortedLaw sorted_count_law(int64_t draws, int b);

// cdf of V = 1 - U(1-U): 0 below 3/4, sqrt(4v-3) on [3/4,1], 1 above.
double dominating_cdf(double v);

// Exact check that S_n = sum_i f(I_{n,i}/n) (I_n the root-split of the
// size-n tree, i.e. PU(b) counts after n-1 draws) satisfies
// cdf_S(v) >= cdf_V(v) on a uniform grid of [0,1].
struct DominationReport {
  int b = 0;
  int64_t n = 0;
  bool ok = false;
  double min_margin = 0;
  double first_violation_v = -1;
  int64_t state_count = 0;
};

DominationReport check_domination(int64_t n, int b, int grid_points = 10000);
std::vector<DominationReport> check_domination_range(int64_t n_max, int b,
                                                     int grid_points = 10000);

// sum_{i<=b+1} f(y_i) <= sum_{i<=b} f(x_i) for sorted unit-sum x, y with
// (y_1..y_b) <= x componentwise. Validates the shape constraints.
bool sum_inequality_check(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace treetail
