#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "corrnet/error.hpp"
#include "corrnet/harness.hpp"
#include "corrnet/saa_solver.hpp"
#include "corrnet/scenario_gen.hpp"
#include "doctest.h"

using namespace corrnet;

namespace {

struct Fixture {
  Network network;
  Mrf mrf;
};

Fixture small_fixture(std::uint64_t seed = 1, std::size_t nodes = 16, double fraction = 0.3) {
  Network net = generate_network(nodes, 1.4, fraction, 1, seed);
  DisasterModel model;
  model.radius_min = 0.2;
  model.radius_max = 0.4;
  Mrf mrf = generate_disaster_mrf(net, model, seed + 100).mrf;
  return {std::move(net), std::move(mrf)};
}

Policy protect_all(const Network& net) {
  std::vector<ActionId> ids;
  for (const auto& a : net.actions()) ids.push_back(a.id);
  return Policy(ids);
}

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.samplers = {SamplerKind::kGibbs, SamplerKind::kXor};
  c.sample_sizes = {5, 20};
  c.budgets = {0.1, 0.3};
  c.replicates = 3;
  c.seed = 17;
  c.settings.gibbs.burn_in = 50;
  return c;
}

}  // namespace

TEST_CASE("fully protected policy has a deterministic estimate") {
  Fixture f = small_fixture();
  const Policy all = protect_all(f.network);
  Scenario none{std::vector<std::uint8_t>(f.network.variable_count(), 0)};
  const double expect = reachable_weight(f.network, none, all);
  McEstimate est = estimate_policy_value_mc(f.mrf, f.network, all, 300, 3);
  CHECK(est.estimate == expect);
  CHECK(est.standard_error == 0.0);
  CHECK(est.sampler == "gibbs");
}

TEST_CASE("Monte Carlo estimate is within 4 standard errors of the exact value") {
  Fixture f = small_fixture(2, 14, 0.25);
  REQUIRE(f.mrf.variable_count() <= 12);
  for (std::size_t k = 0; k < 3; ++k) {
    Policy pol({f.network.actions()[k].id});
    const double exact = exact_policy_value(f.mrf, f.network, pol);
    McEstimate est = estimate_policy_value_mc(f.mrf, f.network, pol, 5000, 10 + k);
    CHECK(std::abs(est.estimate - exact) <= 4.0 * est.standard_error + 1e-9 * exact);
  }
}

TEST_CASE("M = 1 equals a single draw") {
  Fixture f = small_fixture(3);
  Policy pol({f.network.actions()[0].id});
  McEstimate est = estimate_policy_value_mc(f.mrf, f.network, pol, 1, 8);
  auto draw = draw_scenarios(f.mrf, f.network, SamplerKind::kGibbs, 1, 8, SamplerSettings{});
  CHECK(est.estimate == reachable_weight(f.network, draw[0], pol));
  CHECK(est.standard_error == 0.0);
  CHECK_THROWS_AS(estimate_policy_value_mc(f.mrf, f.network, pol, 0, 8), Error);
}

TEST_CASE("XOR estimation path runs") {
  Fixture f = small_fixture(4, 12, 0.3);
  McOptions opts;
  opts.sampler = SamplerKind::kXor;
  McEstimate est = estimate_policy_value_mc(f.mrf, f.network, Policy{}, 50, 1, opts);
  CHECK(est.sampler == "xor");
  CHECK(est.estimate >= 0.0);
}

TEST_CASE("convergence diagnostic") {
  Fixture f = small_fixture(5, 14, 0.35);
  const std::vector<std::size_t> sizes{10, 100, 1000, 5000};
  auto zeros = convergence_diagnostic(f.mrf, f.network, protect_all(f.network), sizes, 1);
  CHECK(zeros.size() == 3);
  for (double d : zeros) CHECK(d == 0.0);

  Policy none;
  auto diffs = convergence_diagnostic(f.mrf, f.network, none, sizes, 2);
  CHECK(diffs == convergence_diagnostic(f.mrf, f.network, none, sizes, 2));
  ExactDistribution exact(f.mrf);
  const double sd = std::sqrt(exact.policy_variance(f.network, none));
  CHECK(std::abs(diffs.back()) <= 6.0 * sd / std::sqrt(5000.0));
  CHECK_THROWS_AS(convergence_diagnostic(f.mrf, f.network, none, {10, 10}, 1), Error);
}

TEST_CASE("one cell, one replicate equals a manual pipeline run") {
  Fixture f = small_fixture(6);
  ExperimentConfig c;
  c.samplers = {SamplerKind::kGibbs};
  c.sample_sizes = {12};
  c.budgets = {0.2};
  c.replicates = 1;
  c.seed = 99;
  ExperimentResult r = run_experiment(c, f.network, f.mrf);
  REQUIRE(r.rows.size() == 1);
  const std::string csv = results_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  const std::uint64_t seed = replicate_seed(99, SamplerKind::kGibbs, 12, 0.2, 0);
  SaaInstance inst{f.network, draw_scenarios(f.mrf, f.network, SamplerKind::kGibbs, 12, derive_seed(seed, 0), c.settings),
                   0.2 * f.network.total_action_cost()};
  SolveResult solved = solve_exact(inst);
  CHECK(r.rows[0].policy == solved.policy);
  CHECK(*r.rows[0].value == exact_policy_value(f.mrf, f.network, solved.policy));
  CHECK(r.rows[0].value_mode == "exact");
  CHECK(r.rows[0].solver == "exact");
}

TEST_CASE("experiments are reproducible and order-independent") {
  Fixture f = small_fixture(7, 14, 0.3);
  ExperimentConfig c = tiny_config();
  ExperimentResult a = run_experiment(c, f.network, f.mrf);
  ExperimentResult b = run_experiment(c, f.network, f.mrf);
  CHECK(results_csv(a) == results_csv(b));
  CHECK(results_svg(a) == results_svg(b));
  CHECK(manifest_json(c, a).dump() == manifest_json(c, b).dump());

  ExperimentConfig shuffled = c;
  shuffled.samplers = {SamplerKind::kXor, SamplerKind::kGibbs};
  shuffled.budgets = {0.3, 0.1};
  shuffled.sample_sizes = {20, 5};
  CHECK(results_csv(run_experiment(shuffled, f.network, f.mrf)) == results_csv(a));

  // Fewer replicates: surviving rows are unchanged.
  ExperimentConfig fewer = c;
  fewer.replicates = 2;
  ExperimentResult r = run_experiment(fewer, f.network, f.mrf);
  std::size_t matched = 0;
  for (const auto& row : r.rows) {
    for (const auto& full : a.rows) {
      if (full.sampler == row.sampler && full.n_samples == row.n_samples &&
          full.budget_fraction == row.budget_fraction && full.replicate == row.replicate) {
        CHECK(full.policy == row.policy);
        CHECK(full.value == row.value);
        ++matched;
      }
    }
  }
  CHECK(matched == r.rows.size());

  std::set<std::uint64_t> seeds;
  for (const auto& row : a.rows) seeds.insert(row.seed);
  CHECK(seeds.size() == a.rows.size());
}

TEST_CASE("aggregation matches recomputation and exact values") {
  Fixture f = small_fixture(8, 14, 0.3);
  ExperimentConfig c = tiny_config();
  ExperimentResult r = run_experiment(c, f.network, f.mrf);
  CHECK(r.cells.size() == 8);
  for (const auto& cell : r.cells) {
    std::vector<double> vals;
    for (const auto& row : r.rows)
      if (row.sampler == cell.sampler && row.n_samples == cell.n_samples &&
          row.budget_fraction == cell.budget_fraction && row.value)
        vals.push_back(*row.value);
    REQUIRE(vals.size() == c.replicates);
    double mean = 0.0;
    for (double v : vals) mean += v / double(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean) / double(vals.size());
    CHECK(cell.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(cell.std_population == doctest::Approx(std::sqrt(var)).epsilon(1e-12).scale(1.0));
  }
  for (const auto& row : r.rows) {
    CHECK(row.error_code.empty());
    CHECK(*row.value == doctest::Approx(exact_policy_value(f.mrf, f.network, row.policy)).epsilon(1e-12));
  }
}

TEST_CASE("Monte Carlo evaluation mode and runtime opt-in") {
  Fixture f = small_fixture(9, 14, 0.3);
  ExperimentConfig c;
  c.sample_sizes = {8};
  c.replicates = 2;
  c.evaluation = ExperimentConfig::Evaluation::kMonteCarlo;
  c.mc_samples = 200;
  c.record_runtime = true;
  ExperimentResult r = run_experiment(c, f.network, f.mrf);
  for (const auto& row : r.rows) {
    CHECK(row.value_mode == "monte_carlo");
    CHECK(row.runtime_ms.has_value());
    CHECK(row.standard_error >= 0.0);
  }
  c.record_runtime = false;
  for (const auto& row : run_experiment(c, f.network, f.mrf).rows) CHECK_FALSE(row.runtime_ms.has_value());
}

TEST_CASE("replicate failures are recorded and the run continues") {
  Fixture f = small_fixture(10, 14, 0.3);
  ExperimentConfig c;
  c.samplers = {SamplerKind::kGibbs, SamplerKind::kXor};
  c.sample_sizes = {4};
  c.replicates = 2;
  c.settings.xor_config.search.bit_cap = 3;
  ExperimentResult r = run_experiment(c, f.network, f.mrf);
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    if (row.sampler == SamplerKind::kXor) {
      CHECK(row.error_code == "search_cap_exceeded");
      CHECK_FALSE(row.value.has_value());
    } else {
      CHECK(row.error_code.empty());
    }
  }
  const std::string csv = results_csv(r);
  CHECK(csv.find(",search_cap_exceeded\n") != std::string::npos);
}

TEST_CASE("greedy is used above the exact cap") {
  Fixture f = small_fixture(11, 14, 0.3);
  ExperimentConfig c;
  c.sample_sizes = {6};
  c.replicates = 1;
  c.exact_cap = 1;
  ExperimentResult r = run_experiment(c, f.network, f.mrf);
  CHECK(r.rows[0].solver == "greedy");
  CHECK(manifest_json(c, r).at("cells")[0].at("solver") == "greedy");
}

TEST_CASE("config parsing") {
  Json doc = Json::parse(R"({
    "network": "inst/network.json", "mrf": "/abs/mrf.json", "samplers": ["xor", "gibbs"],
    "sample_sizes": [10, 60], "budgets": [0.1, 0.4], "replicates": 4, "evaluation": "monte_carlo",
    "mc_samples": 100, "seed": 5, "solver": "greedy", "gibbs": {"burn_in": 20, "thinning": 3},
    "xor": {"max_retries": 50}
  })");
  ExperimentConfig c = experiment_config_from_json(doc, "/base");
  CHECK(c.network_path == std::filesystem::path("/base/inst/network.json"));
  CHECK(c.mrf_path == std::filesystem::path("/abs/mrf.json"));
  CHECK(c.samplers.size() == 2);
  CHECK(c.evaluation == ExperimentConfig::Evaluation::kMonteCarlo);
  CHECK(c.solver == ExperimentConfig::Solver::kGreedy);
  CHECK(c.settings.gibbs.thinning == 3);
  CHECK(c.mc.settings.gibbs.burn_in == 20);
  CHECK(c.settings.xor_config.max_retries == 50);
  CHECK(experiment_config_from_json(to_json(c)).sample_sizes == c.sample_sizes);

  CHECK(experiment_config_from_json(Json::parse(R"({"sampler": "xor"})")).samplers ==
        std::vector<SamplerKind>{SamplerKind::kXor});
  for (const char* bad : {R"({"samplr": "xor"})", R"({"sampler": "metropolis"})", R"({"budgets": [1.5]})",
                          R"({"replicates": 0})", R"({"sample_sizes": []})", R"({"sampler": "xor", "samplers": ["xor"]})",
                          R"({"evaluation": "guess"})", R"({"gibbs": {"thinning": 0}})"}) {
    CHECK_THROWS_AS(experiment_config_from_json(Json::parse(bad)), Error);
  }
}

TEST_CASE("output files") {
  Fixture f = small_fixture(12, 14, 0.3);
  ExperimentConfig c = tiny_config();
  c.replicates = 2;
  ExperimentResult r = run_experiment(c, f.network, f.mrf);
  const auto dir = std::filesystem::temp_directory_path() / "corrnet_harness_test";
  std::filesystem::remove_all(dir);
  write_experiment_outputs(dir, c, r);
  for (const char* name : {"results.csv", "summary.csv", "results.svg", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  std::ifstream csv(dir / "results.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "sampler,n_samples,budget_fraction,replicate,policy_actions,value,value_mode,stderr,runtime_ms,error_code");
  std::ifstream svg(dir / "results.svg");
  std::string first;
  std::getline(svg, first);
  CHECK(first.rfind("<svg", 0) == 0);
  Json manifest = read_json(dir / "manifest.json");
  CHECK(manifest.at("cells").size() == r.cells.size());
  CHECK(manifest.at("config").at("seed") == c.seed);
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("summary of a constant cell is exact") {
  std::vector<ReplicateRow> rows;
  for (std::size_t r = 0; r < 10; ++r) {
    ReplicateRow row;
    row.replicate = r;
    row.value = 6077.999999999999;
    rows.push_back(row);
  }
  ReplicateRow failed;
  failed.replicate = 10;
  failed.error_code = "sampling_failure";
  rows.push_back(failed);
  auto cells = summarize(rows);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].values.size() == 10);
  CHECK(cells[0].mean == 6077.999999999999);
  CHECK(cells[0].std_population == 0.0);
}
