#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "treetail/harness.hpp"

using namespace treetail;

namespace {

ExperimentConfig small_tails_config() {
  ExperimentConfig config;
  config.model = "bary";
  config.b = 2;
  config.n = 50;
  config.samples = 2000;
  config.weights = "unit";
  config.seed = 99;
  config.d_bound = 1.0;
  config.t_points = 16;
  return config;
}

}  // namespace

TEST_CASE("fixed seed gives byte-identical reports across shard counts") {
  ExperimentConfig config = small_tails_config();
  const std::string once = tail_report_csv(run_tails(config));
  const std::string twice = tail_report_csv(run_tails(config));
  CHECK(once == twice);

  config.shards = 3;
  const std::string sharded = tail_report_csv(run_tails(config));
  CHECK(once == sharded);

  ExperimentConfig other_seed = small_tails_config();
  other_seed.seed = 100;
  CHECK(once != tail_report_csv(run_tails(other_seed)));
}

TEST_CASE("csv schema is stable") {
  const TailReport report = run_tails(small_tails_config());
  const std::string csv = tail_report_csv(report);
  CHECK(csv.rfind("t,side,freq,stderr,bound,margin\n", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  for (const TailRow& row : report.rows) {
    CHECK((row.side == "wiener_upper" || row.side == "wiener_lower" ||
           row.side == "path_upper" || row.side == "path_lower"));
    CHECK(row.freq >= 0.0);
    CHECK(row.freq <= 1.0);
    CHECK(row.stderr_ == doctest::Approx(std::sqrt(row.freq * (1 - row.freq) / 2000)));
  }
}

TEST_CASE("json report carries provenance on every row") {
  const TailReport report = run_tails(small_tails_config());
  const auto j = nlohmann::json::parse(tail_report_json(report));
  CHECK(j["d_provenance"] == "explicit");
  CHECK(j["all_within"].is_boolean());
  REQUIRE(!j["rows"].empty());
  for (const auto& row : j["rows"]) {
    CHECK(row.contains("d_provenance"));
    CHECK(row["d_bound"] == 1.0);
  }
}

TEST_CASE("default grid touches every piece of the bound") {
  const PiecewiseBound bound = PiecewiseBound::make(1.0, solve_constants());
  const auto grid = default_t_grid(bound, 0.01, 100.0, 64);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  std::array<int, 6> hits{};
  for (double t : grid) hits[active_piece(t, bound)] += 1;
  for (int piece = 1; piece <= 5; ++piece) CHECK(hits[piece] > 0);
}

TEST_CASE("bound holds on a small unit-weight experiment") {
  const TailReport report = run_tails(small_tails_config());
  CHECK(report.d_provenance == "explicit");
  CHECK(report.all_within());
}

TEST_CASE("estimate requires a budget and is recorded in provenance") {
  ExperimentConfig config = small_tails_config();
  config.estimate_d = true;
  CHECK_THROWS_AS(run_tails(config), std::invalid_argument);

  config.est_samples = 20;
  config.est_nmax = 64;
  const TailReport report = run_tails(config);
  CHECK(report.d_provenance.rfind("estimated(", 0) == 0);
  CHECK(report.d_used > 0.0);
}

TEST_CASE("gof distinguishes the exact support") {
  ExperimentConfig config;
  config.model = "bary";
  config.b = 2;
  config.n = 3;
  config.samples = 20000;
  config.weights = "unit";
  config.seed = 5;
  const GofReport report = run_gof(config);
  CHECK(report.ok());
  CHECK(report.chi2.pvalue >= 1e-6);
  // P(P_3 = 2) = 1/3
  double freq = 0;
  for (const GofRow& row : report.rows) {
    if (row.path == 2.0) freq += static_cast<double>(row.observed) / config.samples;
  }
  CHECK(std::abs(freq - 1.0 / 3.0) <= 4.0 * binomial_stderr(1.0 / 3.0, config.samples));
}

TEST_CASE("gof handles non-integer weight values") {
  ExperimentConfig config;
  config.model = "bary";
  config.b = 2;
  config.n = 4;
  config.samples = 20000;
  config.weights = "const:2.5";
  config.seed = 12;
  const GofReport report = run_gof(config);
  CHECK(report.ok());
  int64_t seen = 0;
  for (const GofRow& row : report.rows) seen += row.observed;
  CHECK(seen == config.samples);  // every sample snapped onto the exact support
}

TEST_CASE("gof on the single-node tree") {
  ExperimentConfig config;
  config.model = "bary";
  config.b = 2;
  config.n = 1;
  config.samples = 100;
  config.seed = 6;
  const GofReport report = run_gof(config);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].observed == 100);
  CHECK(report.tv == 0.0);
}

TEST_CASE("transfer comparison for the linear model") {
  ExperimentConfig config;
  config.model = "linear";
  config.beta = 0.0;
  config.n = 4;
  config.samples = 20000;
  config.seed = 7;
  const GofReport report = run_gof(config, /*transfer=*/true);
  CHECK(report.ok());
  CHECK(report.chi2.pvalue >= 1e-6);

  config.beta = 0.5;  // not an integer: no b-ary counterpart
  CHECK_THROWS_AS(run_gof(config, true), std::invalid_argument);
}

TEST_CASE("simulate emits one row per sample") {
  ExperimentConfig config;
  config.model = "bary";
  config.b = 3;
  config.n = 5;
  config.samples = 4;
  config.weights = "perm:1,0,0";
  config.seed = 8;
  const std::string csv = run_simulate_csv(config);
  CHECK(csv.rfind("sample_id,n,path_length,wiener,I_1,I_2,I_3\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  config.model = "linear";
  const std::string linear_csv = run_simulate_csv(config);
  CHECK(linear_csv.rfind("sample_id,n,path_length,wiener\n", 0) == 0);
}
