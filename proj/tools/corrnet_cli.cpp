// Command-line front end: generate instances, sample scenarios, solve and
// export SAA problems, evaluate policies and run experiment sweeps.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corrnet/error.hpp"
#include "corrnet/harness.hpp"
#include "corrnet/io.hpp"
#include "corrnet/saa_solver.hpp"
#include "corrnet/samplers.hpp"
#include "corrnet/scenario_gen.hpp"

namespace {

using namespace corrnet;

struct GenerateArgs {
  std::string preset = "small";
  std::optional<std::size_t> nodes;
  std::optional<double> density;
  std::optional<double> crossing_fraction;
  std::optional<std::size_t> sources;
  DisasterModel model;
  std::string strength = "strong";
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int run_generate(const GenerateArgs& a) {
  NetworkGenConfig config;
  if (a.preset == "small") {
    config = small_preset();
  } else if (a.preset == "large") {
    config = large_preset();
  } else {
    fail(ErrorCode::kInvalidArgument, "preset must be small or large");
  }
  if (a.nodes) config.node_count = *a.nodes;
  if (a.density) config.edge_density = *a.density;
  if (a.crossing_fraction) config.crossing_fraction = *a.crossing_fraction;
  if (a.sources) config.source_count = *a.sources;
  DisasterModel model = a.model;
  model.strength = a.strength == "weak" ? DisasterModel::Strength::kWeak : DisasterModel::Strength::kStrong;

  Network network = generate_network(config, derive_seed(a.seed, 0));
  DisasterInstance disaster = generate_disaster_mrf(network, model, derive_seed(a.seed, 1));

  std::filesystem::path dir(a.out_dir);
  std::filesystem::create_directories(dir);
  write_json(dir / "network.json", network_to_json(network));
  write_json(dir / "mrf.json", mrf_to_json(disaster.mrf));

  Json regions = Json::array();
  for (const auto& r : disaster.regions.regions) {
    regions.push_back({{"center", {r.center.x, r.center.y}}, {"radius", r.radius}, {"edge_ids", r.edges}});
  }
  Json meta;
  meta["seed"] = a.seed;
  meta["network"] = {{"preset", a.preset},
                     {"node_count", config.node_count},
                     {"edge_density", config.edge_density},
                     {"crossing_fraction", config.crossing_fraction},
                     {"source_count", config.source_count},
                     {"weight_range", {config.weight_min, config.weight_max}},
                     {"edges", network.edge_count()},
                     {"stochastic_edges", network.variable_count()}};
  meta["disaster"] = {{"center_count", model.center_count},
                      {"radius_range", {model.radius_min, model.radius_max}},
                      {"unary_fail_prob", model.unary_fail_prob},
                      {"strength", a.strength},
                      {"lambda", model.lambda()},
                      {"lambda_strong", model.lambda_strong},
                      {"lambda_weak", model.lambda_weak},
                      {"scope_cap", model.scope_cap},
                      {"regions", std::move(regions)}};
  write_json(dir / "metadata.json", meta);
  std::cout << "wrote " << network.node_count() << " nodes, " << network.edge_count() << " edges ("
            << network.variable_count() << " stochastic), " << disaster.mrf.factor_count() << " factors to "
            << dir.string() << '\n';
  return 0;
}

struct SampleArgs {
  std::string mrf;
  std::string sampler = "gibbs";
  std::size_t n = 100;
  std::uint64_t seed = 0;
  GibbsConfig gibbs;
  XorConfig xor_config;
  std::string output;
};

int run_sample(const SampleArgs& a) {
  Mrf mrf = read_mrf(a.mrf);
  SamplerKind kind = parse_sampler(a.sampler);
  std::vector<Scenario> draws;
  Json header{{"sampler", a.sampler}, {"seed", a.seed}};
  if (kind == SamplerKind::kGibbs) {
    GibbsConfig config = a.gibbs;
    config.seed = a.seed;
    draws = gibbs_sample(mrf, config, a.n);
    header["burn_in"] = config.burn_in;
    header["thinning"] = config.thinning;
  } else {
    XorConfig config = a.xor_config;
    config.seed = a.seed;
    XorStats stats;
    draws = xor_sample_weighted(mrf, slices_for(mrf), config, a.n, &stats);
    header["max_retries"] = config.max_retries;
    std::cerr << "xor: " << stats.accepted << " accepted of " << stats.attempts << " attempts, " << stats.nodes
              << " search nodes\n";
  }
  if (a.output.empty() || a.output == "-") {
    write_scenarios(std::cout, mrf.variables(), draws, header);
  } else {
    std::ofstream out(a.output, std::ios::binary);
    if (!out) fail(ErrorCode::kStructural, "cannot write " + a.output);
    write_scenarios(out, mrf.variables(), draws, header);
  }
  return 0;
}

struct InstanceArgs {
  std::string network;
  std::string scenarios;
  std::optional<double> budget;
  std::optional<double> budget_fraction;
};

SaaInstance load_instance(const InstanceArgs& a) {
  Network network = read_network(a.network);
  std::vector<Scenario> scenarios = scenarios_for(read_scenarios(std::filesystem::path(a.scenarios)), network);
  double budget = 0.0;
  if (a.budget && a.budget_fraction) fail(ErrorCode::kInvalidArgument, "give --budget or --budget-fraction");
  if (a.budget) budget = *a.budget;
  if (a.budget_fraction) budget = *a.budget_fraction * network.total_action_cost();
  return SaaInstance{std::move(network), std::move(scenarios), budget};
}

int run_solve(const InstanceArgs& a, const std::string& solver) {
  SaaInstance instance = load_instance(a);
  SolveResult r = solver == "greedy" ? solve_greedy(instance) : solve_exact(instance);
  Json out{{"solver", solver},
           {"budget", instance.budget},
           {"policy", r.policy.actions()},
           {"objective", r.objective},
           {"upper_bound", r.upper_bound},
           {"nodes_explored", r.nodes_explored},
           {"proven_optimal", r.proven_optimal}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_export(const InstanceArgs& a, const std::string& output) {
  std::string lp = export_mip_lp(load_instance(a));
  if (output.empty() || output == "-") {
    std::cout << lp;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) fail(ErrorCode::kStructural, "cannot write " + output);
    out << lp;
  }
  return 0;
}

struct EvaluateArgs {
  std::string network;
  std::string mrf;
  std::vector<ActionId> actions;
  std::size_t mc = 0;
  std::string sampler = "gibbs";
  std::uint64_t seed = 0;
};

int run_evaluate(const EvaluateArgs& a) {
  Network network = read_network(a.network);
  Mrf mrf = read_mrf(a.mrf);
  Policy policy(a.actions);
  Json out{{"policy", policy.actions()}, {"cost", policy_cost(network, policy)}};
  if (a.mc == 0) {
    out["mode"] = "exact";
    out["value"] = exact_policy_value(mrf, network, policy);
  } else {
    McOptions options;
    options.sampler = parse_sampler(a.sampler);
    McEstimate est = estimate_policy_value_mc(mrf, network, policy, a.mc, a.seed, options);
    out["mode"] = "monte_carlo";
    out["sampler"] = est.sampler;
    out["samples"] = a.mc;
    out["value"] = est.estimate;
    out["stderr"] = est.standard_error;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_dir) {
  std::filesystem::path path(config_path);
  ExperimentConfig config = experiment_config_from_json(read_json(path), path.parent_path());
  ExperimentResult result = run_experiment(config);
  write_experiment_outputs(out_dir, config, result);
  std::size_t failed = 0;
  for (const auto& r : result.rows) failed += r.error_code.empty() ? 0 : 1;
  std::cout << result.rows.size() << " replicates in " << result.cells.size() << " cells, " << failed
            << " failed; outputs in " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrnet: network protection under correlated edge failures"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a network and a disaster MRF");
  generate->add_option("--preset", gen.preset, "small or large")->check(CLI::IsMember({"small", "large"}));
  generate->add_option("--nodes", gen.nodes);
  generate->add_option("--density", gen.density, "undirected segments per node");
  generate->add_option("--crossing-fraction", gen.crossing_fraction);
  generate->add_option("--sources", gen.sources);
  generate->add_option("--centers", gen.model.center_count)->capture_default_str();
  generate->add_option("--radius-min", gen.model.radius_min)->capture_default_str();
  generate->add_option("--radius-max", gen.model.radius_max)->capture_default_str();
  generate->add_option("--fail-prob", gen.model.unary_fail_prob)->capture_default_str();
  generate->add_option("--strength", gen.strength)->check(CLI::IsMember({"strong", "weak"}))->capture_default_str();
  generate->add_option("--lambda-strong", gen.model.lambda_strong)->capture_default_str();
  generate->add_option("--lambda-weak", gen.model.lambda_weak)->capture_default_str();
  generate->add_option("--seed", gen.seed)->capture_default_str();
  generate->add_option("-o,--out-dir", gen.out_dir)->capture_default_str();

  SampleArgs smp;
  auto* sample = app.add_subcommand("sample", "Draw scenarios from an MRF");
  sample->add_option("--mrf", smp.mrf)->required();
  sample->add_option("--sampler", smp.sampler)->check(CLI::IsMember({"gibbs", "xor"}))->capture_default_str();
  sample->add_option("-n,--count", smp.n)->capture_default_str();
  sample->add_option("--seed", smp.seed)->capture_default_str();
  sample->add_option("--burn-in", smp.gibbs.burn_in)->capture_default_str();
  sample->add_option("--thinning", smp.gibbs.thinning)->capture_default_str();
  sample->add_option("--retries", smp.xor_config.max_retries)->capture_default_str();
  sample->add_option("-o,--output", smp.output, "scenario file (default stdout)");

  InstanceArgs inst;
  std::string solver = "exact";
  auto* solve = app.add_subcommand("solve", "Solve the sample-average problem");
  auto add_instance = [&](CLI::App* cmd) {
    cmd->add_option("--network", inst.network)->required();
    cmd->add_option("--scenarios", inst.scenarios)->required();
    cmd->add_option("--budget", inst.budget, "absolute budget");
    cmd->add_option("--budget-fraction", inst.budget_fraction, "fraction of total action cost");
  };
  add_instance(solve);
  solve->add_option("--solver", solver)->check(CLI::IsMember({"exact", "greedy"}))->capture_default_str();

  std::string lp_output;
  auto* export_mip = app.add_subcommand("export-mip", "Write the MIP in LP format");
  add_instance(export_mip);
  export_mip->add_option("-o,--output", lp_output, "LP file (default stdout)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Value of a policy under the MRF");
  evaluate->add_option("--network", ev.network)->required();
  evaluate->add_option("--mrf", ev.mrf)->required();
  evaluate->add_option("--actions", ev.actions, "action ids")->delimiter(',');
  evaluate->add_option("--mc", ev.mc, "Monte Carlo sample count (0 = exact)")->capture_default_str();
  evaluate->add_option("--sampler", ev.sampler)->check(CLI::IsMember({"gibbs", "xor"}))->capture_default_str();
  evaluate->add_option("--seed", ev.seed)->capture_default_str();

  std::string config_path;
  std::string out_dir = "results";
  auto* experiment = app.add_subcommand("experiment", "Run an experiment sweep from a JSON config");
  experiment->add_option("config", config_path)->required();
  experiment->add_option("-o,--out-dir", out_dir)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return run_generate(gen);
    if (*sample) return run_sample(smp);
    if (*solve) return run_solve(inst, solver);
    if (*export_mip) return run_export(inst, lp_output);
    if (*evaluate) return run_evaluate(ev);
    if (*experiment) return run_experiment_cmd(config_path, out_dir);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
