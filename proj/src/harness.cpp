#include "treetail/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace treetail {

namespace {

using nlohmann::json;

WeightSampler sampler_for(const ExperimentConfig& config) {
  return WeightSampler::parse(config.weights, config.b);
}

// The linear model with integer beta maps onto the (beta+2)-ary tree with
// permutation weights (1,0,...,0): P_n = P~_{n-1} + (n-1) and
// W_n = W~_{n-1} - P~_{n-1} + (n-1)^2 in distribution.
int linear_equivalent_b(double beta) {
  const double rounded = std::round(beta);
  if (std::abs(beta - rounded) > 1e-12 || rounded < 0) {
    throw std::invalid_argument("linear model: centering requires integer beta = b - 2");
  }
  return static_cast<int>(rounded) + 2;
}

struct LinearCentering {
  double e_path = 0;
  double e_wiener = 0;
};

LinearCentering linear_centering(int64_t n, double beta) {
  const int b = linear_equivalent_b(beta);
  std::vector<double> ones(b, 0.0);
  ones[0] = 1.0;
  const double mu = 1.0 / b;
  const ExpectationTable table = expectations(n - 1, b, mu);
  const double np = static_cast<double>(n - 1);
  return LinearCentering{table.path[n - 1] + np,
                         table.wiener[n - 1] - table.path[n - 1] + np * np};
}

}  // namespace

std::vector<double> default_t_grid(const PiecewiseBound& bound, double lo_mult, double hi_mult,
                                   int points) {
  if (points < 2 || !(lo_mult > 0) || !(hi_mult > lo_mult)) {
    throw std::invalid_argument("default_t_grid: bad grid spec");
  }
  const double d = bound.d_bound;
  std::vector<double> grid;
  grid.reserve(points + 5);
  const double lo = std::log(lo_mult * d), hi = std::log(hi_mult * d);
  for (int i = 0; i < points; ++i) {
    grid.push_back(std::exp(lo + (hi - lo) * i / (points - 1)));
  }
  // one representative inside every piece
  const auto& bp = bound.breakpoints;
  grid.push_back(0.5 * bp[0]);
  grid.push_back(std::sqrt(bp[0] * bp[1]));
  grid.push_back(std::sqrt(bp[1] * bp[2]));
  grid.push_back(std::sqrt(bp[2] * bp[3]));
  grid.push_back(1.5 * bp[3]);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

bool TailReport::all_within() const {
  for (const TailRow& row : rows) {
    if (row.margin < 0) return false;
  }
  return true;
}

TailReport run_tails(const ExperimentConfig& config) {
  if (config.samples < 1) throw std::invalid_argument("run_tails: samples must be >= 1");
  if (config.shards < 1) throw std::invalid_argument("run_tails: shards must be >= 1");
  const bool linear = config.model == "linear";
  if (!linear && config.model != "bary") {
    throw std::invalid_argument("run_tails: model must be 'bary' or 'linear'");
  }

  const Constants constants = solve_constants();
  double d_used = config.d_bound;
  std::string provenance = "explicit";
  if (config.estimate_d) {
    if (config.est_samples < 1 || config.est_nmax < 2) {
      throw std::invalid_argument("run_tails: d_bound='estimate' needs an estimation budget");
    }
    const int b = linear ? linear_equivalent_b(config.beta) : config.b;
    WeightSampler sampler = sampler_for(config);
    if (linear) {
      std::vector<double> v(b, 0.0);
      v[0] = 1.0;
      sampler = WeightSampler::permutation(v);
    }
    const DBoundEstimate est = estimate_d_bound(b, sampler, config.est_nmax, config.est_samples,
                                                config.seed, config.est_safety);
    d_used = est.value;
    std::ostringstream os;
    os << "estimated(raw_max=" << format_double(est.raw_max) << ",n=" << est.raw_max_n
       << ",nmax=" << est.n_max << ",samples_per_size=" << est.samples_per_size
       << ",safety=" << est.safety << ")";
    provenance = os.str();
  }
  const PiecewiseBound bound = PiecewiseBound::make(d_used, constants);
  std::vector<double> grid = config.t_explicit;
  if (grid.empty()) {
    grid = default_t_grid(bound, config.t_lo_mult, config.t_hi_mult, config.t_points);
  } else if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::invalid_argument("run_tails: explicit t grid must be increasing");
  }

  // Exact centering.
  double e_path = 0, e_wiener = 0;
  ExpectationTable table;
  if (linear) {
    const LinearCentering c = linear_centering(config.n, config.beta);
    e_path = c.e_path;
    e_wiener = c.e_wiener;
  } else {
    table = expectations(config.n, config.b, sampler_for(config).mu());
    e_path = table.path[config.n];
    e_wiener = table.wiener[config.n];
  }

  const size_t g = grid.size();
  // counts[side][grid index], sides: wiener_upper, wiener_lower, path_upper, path_lower
  std::vector<std::array<std::vector<int64_t>, 4>> shard_counts(config.shards);
  const WeightSampler sampler = linear ? WeightSampler::unit(2) : sampler_for(config);

  auto work = [&](int shard) {
    auto& counts = shard_counts[shard];
    for (auto& side : counts) side.assign(g, 0);
    const int64_t lo = config.samples * shard / config.shards;
    const int64_t hi = config.samples * (shard + 1) / config.shards;
    const double dn = static_cast<double>(config.n);
    for (int64_t replicate = lo; replicate < hi; ++replicate) {
      Philox4x32 rng(config.seed, kDomainTails, static_cast<uint64_t>(replicate));
      const WeightedTree tree = linear ? grow_linear(config.n, config.beta, rng)
                                       : grow_bary(config.n, config.b, sampler, rng);
      const FunctionalPair f = compute_functionals(tree);
      const double xw = (f.wiener - e_wiener) / (dn * dn);
      const double xp = (f.path_length - e_path) / dn;
      for (size_t i = 0; i < g; ++i) {
        const double t = grid[i];
        counts[0][i] += xw > t;
        counts[1][i] += xw < -t;
        counts[2][i] += xp > t;
        counts[3][i] += xp < -t;
      }
    }
  };

  if (config.shards == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(config.shards);
    for (int s = 0; s < config.shards; ++s) threads.emplace_back(work, s);
    for (auto& t : threads) t.join();
  }

  // Ordered reduction over shards.
  std::array<std::vector<int64_t>, 4> totals;
  for (auto& side : totals) side.assign(g, 0);
  for (int s = 0; s < config.shards; ++s) {
    for (int side = 0; side < 4; ++side) {
      for (size_t i = 0; i < g; ++i) totals[side][i] += shard_counts[s][side][i];
    }
  }

  TailReport report;
  report.b = linear ? 0 : config.b;
  report.n = config.n;
  report.samples = config.samples;
  report.d_used = d_used;
  report.d_provenance = provenance;
  static const char* kSides[4] = {"wiener_upper", "wiener_lower", "path_upper", "path_lower"};
  for (size_t i = 0; i < g; ++i) {
    const double bound_value = upper_tail(grid[i], bound);
    for (int side = 0; side < 4; ++side) {
      TailRow row;
      row.t = grid[i];
      row.side = kSides[side];
      row.freq = static_cast<double>(totals[side][i]) / static_cast<double>(config.samples);
      row.stderr_ = binomial_stderr(row.freq, config.samples);
      row.bound = bound_value;
      row.margin = row.bound - row.freq - 4.0 * row.stderr_;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string tail_report_csv(const TailReport& report) {
  std::string out = "t,side,freq,stderr,bound,margin\n";
  for (const TailRow& row : report.rows) {
    out += format_double(row.t);
    out += ',';
    out += row.side;
    out += ',';
    out += format_double(row.freq);
    out += ',';
    out += format_double(row.stderr_);
    out += ',';
    out += format_double(row.bound);
    out += ',';
    out += format_double(row.margin);
    out += '\n';
  }
  return out;
}

std::string tail_report_json(const TailReport& report) {
  json j;
  j["b"] = report.b;
  j["n"] = report.n;
  j["samples"] = report.samples;
  j["d_bound"] = report.d_used;
  j["d_provenance"] = report.d_provenance;
  j["all_within"] = report.all_within();
  j["rows"] = json::array();
  for (const TailRow& row : report.rows) {
    j["rows"].push_back({{"t", row.t},
                         {"side", row.side},
                         {"freq", row.freq},
                         {"stderr", row.stderr_},
                         {"bound", row.bound},
                         {"margin", row.margin},
                         {"d_bound", report.d_used},
                         {"d_provenance", report.d_provenance}});
  }
  return j.dump(2) + "\n";
}

GofReport run_gof(const ExperimentConfig& config, bool transfer) {
  const bool linear = config.model == "linear";
  if (transfer && !linear) throw std::invalid_argument("run_gof: transfer needs the linear model");

  const int n = static_cast<int>(config.n);
  Pmf<std::pair<double, double>> exact;
  if (!linear) {
    exact = enumerate_bary(n, config.b, sampler_for(config)).joint;
  } else if (!transfer) {
    exact = enumerate_linear(n, linear_equivalent_b(config.beta) - 2).joint;
  } else {
    const int b = linear_equivalent_b(config.beta);
    std::vector<double> v(b, 0.0);
    v[0] = 1.0;
    const auto bary = enumerate_bary(n - 1, b, WeightSampler::permutation(v)).joint;
    const double np = static_cast<double>(n - 1);
    std::map<std::pair<double, double>, Prob> shifted;
    for (const auto& [value, prob] : bary.entries) {
      shifted[{value.first + np, value.second - value.first + np * np}] = prob;
    }
    exact.entries.assign(shifted.begin(), shifted.end());
  }

  // Simulated values can differ from the enumerated support by rounding when
  // the weights are not integers; on an exact-match miss, snap to the nearest
  // atom within 1e-9 relative.
  std::set<std::pair<double, double>> support;
  for (const auto& [value, prob] : exact.entries) support.insert(value);
  const auto snap = [&](double p, double w) -> std::pair<double, double> {
    if (support.count({p, w})) return {p, w};
    for (const auto& value : support) {
      if (std::abs(value.first - p) <= 1e-9 * (1.0 + std::abs(p)) &&
          std::abs(value.second - w) <= 1e-9 * (1.0 + std::abs(w))) {
        return value;
      }
    }
    return {p, w};
  };

  std::map<std::pair<double, double>, int64_t> observed;
  const WeightSampler sampler = linear ? WeightSampler::unit(2) : sampler_for(config);
  for (int64_t replicate = 0; replicate < config.samples; ++replicate) {
    Philox4x32 rng(config.seed, kDomainGof, static_cast<uint64_t>(replicate));
    const WeightedTree tree = linear ? grow_linear(config.n, config.beta, rng)
                                     : grow_bary(config.n, config.b, sampler, rng);
    const FunctionalPair f = compute_functionals(tree);
    observed[snap(f.path_length, f.wiener)] += 1;
  }

  GofReport report;
  report.samples = config.samples;
  std::vector<int64_t> obs_counts;
  std::vector<double> probs;
  double seen = 0;
  for (const auto& [value, prob] : exact.entries) {
    GofRow row;
    row.path = value.first;
    row.wiener = value.second;
    row.exact_p = prob.p;
    const auto it = observed.find(value);
    row.observed = it == observed.end() ? 0 : it->second;
    seen += static_cast<double>(row.observed);
    report.rows.push_back(row);
    obs_counts.push_back(row.observed);
    probs.push_back(prob.p);
    const double freq = static_cast<double>(row.observed) / static_cast<double>(config.samples);
    report.tv += std::abs(freq - prob.p);
    report.tv_limit = std::max(report.tv_limit, 5.0 * binomial_stderr(prob.p, config.samples));
  }
  // mass observed outside the exact support counts fully against TV
  report.tv += (static_cast<double>(config.samples) - seen) / static_cast<double>(config.samples);
  report.tv *= 0.5;
  report.chi2 = chi_square_gof(obs_counts, probs, config.samples);
  return report;
}

std::string gof_report_json(const GofReport& report) {
  json j;
  j["samples"] = report.samples;
  j["tv"] = report.tv;
  j["tv_limit"] = report.tv_limit;
  j["ok"] = report.ok();
  j["chi2"] = {{"stat", report.chi2.stat}, {"dof", report.chi2.dof}, {"pvalue", report.chi2.pvalue}};
  j["rows"] = json::array();
  for (const GofRow& row : report.rows) {
    j["rows"].push_back({{"path", row.path},
                         {"wiener", row.wiener},
                         {"exact_p", row.exact_p},
                         {"observed", row.observed}});
  }
  return j.dump(2) + "\n";
}

std::string run_simulate_csv(const ExperimentConfig& config) {
  const bool linear = config.model == "linear";
  const WeightSampler sampler = linear ? WeightSampler::unit(2) : sampler_for(config);
  std::string out = "sample_id,n,path_length,wiener";
  if (!linear) {
    for (int i = 1; i <= config.b; ++i) out += ",I_" + std::to_string(i);
  }
  out += '\n';
  for (int64_t replicate = 0; replicate < config.samples; ++replicate) {
    Philox4x32 rng(config.seed, kDomainSimulate, static_cast<uint64_t>(replicate));
    const WeightedTree tree = linear ? grow_linear(config.n, config.beta, rng)
                                     : grow_bary(config.n, config.b, sampler, rng);
    const FunctionalPair f = compute_functionals(tree);
    out += std::to_string(replicate);
    out += ',';
    out += std::to_string(config.n);
    out += ',';
    out += format_double(f.path_length);
    out += ',';
    out += format_double(f.wiener);
    if (!linear) {
      for (int64_t part : root_split(tree)) {
        out += ',';
        out += std::to_string(part);
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace treetail
