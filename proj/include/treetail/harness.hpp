#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treetail/exact_engine.hpp"
#include "treetail/recursion_core.hpp"
#include "treetail/stats.hpp"
#include "treetail/tail_bounds.hpp"
#include "treetail/tree_models.hpp"

namespace treetail {

// Shared experiment description. Samples are keyed by (seed, domain,
// replicate), so results are byte-identical for a fixed seed regardless of
// the shard count or thread scheduling.
struct ExperimentConfig {
  std::string model = "bary";  // "bary" or "linear"
  int b = 2;
  double beta = 0.0;
  int64_t n = 1000;
  int64_t samples = 10000;
  std::string weights = "unit";
  uint64_t seed = 1;
  int shards = 1;

  // t grid: log-spaced points over [lo_mult*D, hi_mult*D], plus one point
  // inside each piece of the bound so every regime is exercised. An explicit
  // grid overrides the generated one.
  double t_lo_mult = 0.01;
  double t_hi_mult = 100.0;
  int t_points = 64;
  std::vector<double> t_explicit;

  // D for the bound: explicit value, or estimated from the toll residual
  // (requires an estimation budget).
  bool estimate_d = false;
  double d_bound = 1.0;
  int64_t est_samples = 0;
  int64_t est_nmax = 0;
  double est_safety = 1.1;

  std::string out;             // output path; empty = stdout
  std::string format = "csv";  // "csv" or "json"
};

std::vector<double> default_t_grid(const PiecewiseBound& bound, double lo_mult, double hi_mult,
                                   int points);

struct TailRow {
  double t = 0;
  std::string side;  // wiener_upper | wiener_lower | path_upper | path_lower
  double freq = 0;
  double stderr_ = 0;
  double bound = 0;
  double margin = 0;  // bound - freq - 4*stderr; >= 0 means the bound holds
};

struct TailReport {
  int b = 0;
  int64_t n = 0;
  int64_t samples = 0;
  double d_used = 0;
  std::string d_provenance;  // "explicit" or "estimated(...)"
  std::vector<TailRow> rows;

  bool all_within() const;
};

// Simulates the configured model, forms X_n with exact-expectation
// centering, tabulates both tails of both components on the t grid and
// attaches the bound values.
TailReport run_tails(const ExperimentConfig& config);

// CSV schema (stable): header t,side,freq,stderr,bound,margin; floats with
// 17 significant digits; LF line endings.
std::string tail_report_csv(const TailReport& report);
std::string tail_report_json(const TailReport& report);

struct GofRow {
  double path = 0;
  double wiener = 0;
  double exact_p = 0;
  int64_t observed = 0;
};

struct GofReport {
  int64_t samples = 0;
  double tv = 0;
  double tv_limit = 0;  // 5 x max binomial stderr over the support
  Chi2Result chi2;
  std::vector<GofRow> rows;

  bool ok() const { return tv <= tv_limit; }
};

// Simulator-versus-enumeration comparison of the joint (P, W) law.
// With transfer=true the linear model at size n is compared against the
// shifted b-ary law (P~ + n-1, W~ - P~ + (n-1)^2) at size n-1 with
// permutation weights (1,0,...,0), where b = beta + 2.
GofReport run_gof(const ExperimentConfig& config, bool transfer = false);
std::string gof_report_json(const GofReport& report);

// One simulated row per sample: sample_id, n, path_length, wiener and the
// slot-ordered split vector (b-ary only).
std::string run_simulate_csv(const ExperimentConfig& config);

std::string format_double(double v);  // %.17g

}  // namespace treetail
