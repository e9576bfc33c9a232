// Command-line front end: constants, bound evaluation, simulation, tail
// experiments, toll diagnostics, exact oracles, domination and coupling
// checks. Exit code is nonzero on any assertion-class failure (domination
// violation, coupling ordering violation, tail-bound breach).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "treetail/exact_engine.hpp"
#include "treetail/harness.hpp"
#include "treetail/numerics.hpp"
#include "treetail/recursion_core.hpp"
#include "treetail/tail_bounds.hpp"
#include "treetail/urn_domination.hpp"

using nlohmann::json;
using namespace treetail;

namespace {

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + out_path);
  file << text;
}

ExperimentConfig load_config_file(int argc, char** argv) {
  ExperimentConfig config;
  std::string path;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") path = argv[i + 1];
  }
  if (path.empty()) return config;
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(file);
  config.model = j.value("model", config.model);
  config.b = j.value("b", config.b);
  config.beta = j.value("beta", config.beta);
  config.n = j.value("n", config.n);
  config.samples = j.value("samples", config.samples);
  config.weights = j.value("weights", config.weights);
  config.seed = j.value("seed", config.seed);
  config.shards = j.value("shards", config.shards);
  config.t_lo_mult = j.value("t_lo_mult", config.t_lo_mult);
  config.t_hi_mult = j.value("t_hi_mult", config.t_hi_mult);
  config.t_points = j.value("t_points", config.t_points);
  if (j.contains("t_grid")) config.t_explicit = j["t_grid"].get<std::vector<double>>();
  if (j.contains("d_bound")) {
    if (j["d_bound"].is_string()) {
      if (j["d_bound"] != "estimate") throw std::runtime_error("d_bound: number or 'estimate'");
      config.estimate_d = true;
    } else {
      config.d_bound = j["d_bound"].get<double>();
    }
  }
  config.est_samples = j.value("est_samples", config.est_samples);
  config.est_nmax = j.value("est_nmax", config.est_nmax);
  config.est_safety = j.value("est_safety", config.est_safety);
  config.out = j.value("out", config.out);
  config.format = j.value("format", config.format);
  return config;
}

json pmf_to_json(const Pmf<double>& pmf) {
  json rows = json::array();
  for (const auto& [value, prob] : pmf.entries) {
    rows.push_back({{"value", value}, {"p", prob.p}, {"num", prob.num}, {"den", prob.den}});
  }
  return rows;
}

int cmd_constants(double tol, const std::string& out) {
  const Constants k = solve_constants(tol);
  json j = {{"gamma", k.gamma},
            {"l0", k.l0},
            {"gamma_residual", gamma_residual(k.gamma)},
            {"l0_residual", l0_residual(k.l0)}};
  emit(out, j.dump(2) + "\n");
  return 0;
}

int cmd_bound(double d, double t, bool table, const std::string& out) {
  const PiecewiseBound bound = PiecewiseBound::make(d, solve_constants());
  json j = {{"d_bound", d},
            {"t", t},
            {"value", upper_tail(t, bound)},
            {"log_value", log_upper_tail(t, bound)},
            {"piece", active_piece(t, bound)}};
  if (table) {
    j["c_threshold"] = bound.c_threshold;
    j["breakpoints"] = bound.breakpoints;
    j["pieces"] = json::array({
        "exp(-t^2 / (10 gamma^2 D^2))            for 0 <= t <= 5 gamma D",
        "exp(5/2 - t / (gamma D))                for 5 gamma D < t <= C",
        "exp(-t^2 / (96 D^2))                    for C < t <= 48 D L0",
        "exp(24 L0^2 - L0 t / D)                 for 48 D L0 < t <= 4 D e^L0",
        "exp(t/D - (t/D) log(t / (4D)))          for 4 D e^L0 < t",
    });
  }
  emit(out, j.dump(2) + "\n");
  return 0;
}

int cmd_toll(const ExperimentConfig& config) {
  const WeightSampler sampler = WeightSampler::parse(config.weights, config.b);
  const ExpectationTable table = expectations(config.n, config.b, sampler.mu());
  double max_norm = 0, mean_w = 0, mean_p = 0, mean_gap = 0;
  for (int64_t replicate = 0; replicate < config.samples; ++replicate) {
    Philox4x32 rng(config.seed, kDomainSimulate, static_cast<uint64_t>(replicate));
    const WeightedTree tree = grow_bary(config.n, config.b, sampler, rng);
    const ScaledVector d = toll_residual(tree, table);
    max_norm = std::max(max_norm, norm(d));
    mean_w += d.wiener;
    mean_p += d.path;
    if (!tree.root_weights.empty()) {
      const ScaledVector main =
          toll_main_term(root_split(tree), tree.root_weights, config.n, sampler.mu(), config.b);
      mean_gap += norm(ScaledVector{d.wiener - main.wiener, d.path - main.path});
    }
  }
  const double s = static_cast<double>(config.samples);
  json j = {{"b", config.b},
            {"n", config.n},
            {"samples", config.samples},
            {"weights", sampler.describe()},
            {"seed", config.seed},
            {"max_norm", max_norm},
            {"mean", {mean_w / s, mean_p / s}},
            {"mean_main_term_gap", mean_gap / s}};
  emit(config.out, j.dump(2) + "\n");
  return 0;
}

int cmd_oracle(const ExperimentConfig& config) {
  json j;
  if (config.model == "bary") {
    const auto result = enumerate_bary(static_cast<int>(config.n), config.b,
                                       WeightSampler::parse(config.weights, config.b));
    j["paths"] = result.paths;
    j["denominator"] = result.denominator;
    j["path_pmf"] = pmf_to_json(result.path);
    j["wiener_pmf"] = pmf_to_json(result.wiener);
    json splits = json::array();
    for (const auto& [value, prob] : result.sorted_split.entries) {
      splits.push_back(
          {{"sorted_split", value}, {"p", prob.p}, {"num", prob.num}, {"den", prob.den}});
    }
    j["sorted_split_pmf"] = splits;
  } else {
    const auto result =
        enumerate_linear(static_cast<int>(config.n), static_cast<int>(config.beta));
    j["paths"] = result.paths;
    j["denominator"] = result.denominator;
    j["path_pmf"] = pmf_to_json(result.path);
    j["wiener_pmf"] = pmf_to_json(result.wiener);
  }
  emit(config.out, j.dump(2) + "\n");
  return 0;
}

int cmd_expectations(int b, int64_t nmax, double mu, const std::string& out) {
  const ExpectationTable table = expectations(nmax, b, mu);
  std::string csv = "n,EP,EW\n";
  for (int64_t n = 1; n <= nmax; ++n) {
    csv += std::to_string(n) + "," + format_double(table.path[n]) + "," +
           format_double(table.wiener[n]) + "\n";
  }
  emit(out, csv);
  return 0;
}

int cmd_dominate(int b, int64_t n, const std::string& out) {
  const DominationReport report = check_domination(n, b);
  json j = {{"b", report.b},
            {"n", report.n},
            {"ok", report.ok},
            {"min_margin", report.min_margin},
            {"states", report.state_count}};
  if (!report.ok) j["first_violation_v"] = report.first_violation_v;
  emit(out, j.dump(2) + "\n");
  return report.ok ? 0 : 1;
}

int cmd_couple(int b, int64_t n, int64_t runs, uint64_t seed, const std::string& out) {
  int64_t violations = 0;
  double mean_top = 0;
  for (int64_t r = 0; r < runs; ++r) {
    Philox4x32 rng(seed, kDomainCouple, static_cast<uint64_t>(r));
    const CoupledRun run = coupled_run(n, b, rng);
    violations += run.ordered ? 0 : 1;
    mean_top += run.upper.back()[0];
  }
  std::string csv = "b,n,runs,violations,mean_top_count\n";
  csv += std::to_string(b) + "," + std::to_string(n) + "," + std::to_string(runs) + "," +
         std::to_string(violations) + "," + format_double(mean_top / runs) + "\n";
  emit(out, csv);
  return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail bounds for path length and Wiener index of random recursive trees"};
  app.require_subcommand(1);

  ExperimentConfig base;
  try {
    base = load_config_file(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  // constants
  auto* constants_cmd = app.add_subcommand("constants", "solve gamma and L0");
  double tol = 1e-12;
  std::string constants_out = base.out;
  constants_cmd->add_option("--tol", tol, "residual tolerance");
  constants_cmd->add_option("--out", constants_out, "output path (default stdout)");

  // bound
  auto* bound_cmd = app.add_subcommand("bound", "evaluate the piecewise upper tail bound");
  double bound_d = 1.0, bound_t = 1.0;
  bool piecewise_table = false;
  std::string bound_out = base.out;
  bound_cmd->add_option("--d-bound", bound_d, "toll bound D");
  bound_cmd->add_option("--t", bound_t, "tail argument t");
  bound_cmd->add_flag("--piecewise-table", piecewise_table, "dump breakpoints and formulas");
  bound_cmd->add_option("--out", bound_out, "output path (default stdout)");

  std::string config_sink;
  auto add_model_options = [&](CLI::App* cmd, ExperimentConfig& c) {
    cmd->add_option("--config", config_sink, "JSON config file (flags override it)");
    cmd->add_option("--model", c.model, "bary or linear");
    cmd->add_option("--b", c.b, "arity");
    cmd->add_option("--beta", c.beta, "linear-model weight parameter");
    cmd->add_option("--n", c.n, "tree size");
    cmd->add_option("--samples", c.samples, "number of replicates");
    cmd->add_option("--weights", c.weights, "unit | const:V | perm:v1,...,vb");
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--out", c.out, "output path (default stdout)");
    cmd->add_option("--format", c.format, "csv or json");
  };

  ExperimentConfig sim_cfg = base;
  auto* simulate_cmd = app.add_subcommand("simulate", "per-sample functional CSV");
  add_model_options(simulate_cmd, sim_cfg);

  ExperimentConfig tails_cfg = base;
  auto* tails_cmd = app.add_subcommand("tails", "empirical tails vs the analytic bound");
  add_model_options(tails_cmd, tails_cfg);
  tails_cmd->add_option("--shards", tails_cfg.shards, "parallel shards");
  std::string d_spec;
  tails_cmd->add_option("--d-bound", d_spec, "toll bound D, or 'estimate'");
  tails_cmd->add_option("--est-samples", tails_cfg.est_samples, "estimation samples per size");
  tails_cmd->add_option("--est-nmax", tails_cfg.est_nmax, "estimation max size");
  tails_cmd->add_option("--est-safety", tails_cfg.est_safety, "estimation safety factor");
  tails_cmd->add_option("--t-points", tails_cfg.t_points, "grid points");
  tails_cmd->add_option("--t-lo-mult", tails_cfg.t_lo_mult, "grid start, multiple of D");
  tails_cmd->add_option("--t-hi-mult", tails_cfg.t_hi_mult, "grid end, multiple of D");

  ExperimentConfig toll_cfg = base;
  auto* toll_cmd = app.add_subcommand("toll", "empirical toll residual report");
  add_model_options(toll_cmd, toll_cfg);

  ExperimentConfig oracle_cfg = base;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact small-n laws by enumeration");
  add_model_options(oracle_cmd, oracle_cfg);

  auto* expectations_cmd = app.add_subcommand("expectations", "E[P_n], E[W_n] table");
  int exp_b = 2;
  int64_t exp_nmax = 100;
  double exp_mu = 1.0;
  std::string exp_out;
  expectations_cmd->add_option("--b", exp_b, "arity");
  expectations_cmd->add_option("--nmax", exp_nmax, "table size");
  expectations_cmd->add_option("--mu", exp_mu, "edge weight mean");
  expectations_cmd->add_option("--out", exp_out, "output path");

  auto* dominate_cmd = app.add_subcommand("dominate", "exact domination cdf check");
  int dom_b = 2;
  int64_t dom_n = 50;
  std::string dom_out;
  dominate_cmd->add_option("--b", dom_b, "arity");
  dominate_cmd->add_option("--n", dom_n, "tree size");
  dominate_cmd->add_option("--out", dom_out, "output path");

  auto* couple_cmd = app.add_subcommand("couple", "coupled urn runs ordering check");
  int cpl_b = 2;
  int64_t cpl_n = 100, cpl_runs = 100;
  uint64_t cpl_seed = base.seed;
  std::string cpl_out;
  couple_cmd->add_option("--b", cpl_b, "arity");
  couple_cmd->add_option("--n", cpl_n, "number of draws");
  couple_cmd->add_option("--runs", cpl_runs, "number of coupled runs");
  couple_cmd->add_option("--seed", cpl_seed, "master seed");
  couple_cmd->add_option("--out", cpl_out, "output path");

  ExperimentConfig gof_cfg = base;
  auto* gof_cmd = app.add_subcommand("gof", "simulator vs exact enumeration");
  add_model_options(gof_cmd, gof_cfg);
  bool transfer = false;
  gof_cmd->add_flag("--transfer", transfer, "compare the linear model against the b-ary law");

  CLI11_PARSE(app, argc, argv);

  try {
    if (constants_cmd->parsed()) return cmd_constants(tol, constants_out);
    if (bound_cmd->parsed()) return cmd_bound(bound_d, bound_t, piecewise_table, bound_out);
    if (simulate_cmd->parsed()) {
      emit(sim_cfg.out, run_simulate_csv(sim_cfg));
      return 0;
    }
    if (tails_cmd->parsed()) {
      if (d_spec == "estimate") {
        tails_cfg.estimate_d = true;
      } else if (!d_spec.empty()) {
        tails_cfg.d_bound = std::stod(d_spec);
      }
      const TailReport report = run_tails(tails_cfg);
      emit(tails_cfg.out,
           tails_cfg.format == "json" ? tail_report_json(report) : tail_report_csv(report));
      return report.all_within() ? 0 : 1;
    }
    if (toll_cmd->parsed()) return cmd_toll(toll_cfg);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_cfg);
    if (expectations_cmd->parsed()) return cmd_expectations(exp_b, exp_nmax, exp_mu, exp_out);
    if (dominate_cmd->parsed()) return cmd_dominate(dom_b, dom_n, dom_out);
    if (couple_cmd->parsed()) return cmd_couple(cpl_b, cpl_n, cpl_runs, cpl_seed, cpl_out);
    if (gof_cmd->parsed()) {
      const GofReport report = run_gof(gof_cfg, transfer);
      emit(gof_cfg.out, gof_report_json(report));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
