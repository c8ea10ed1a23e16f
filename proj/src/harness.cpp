#include "corrnet/harness.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "corrnet/error.hpp"
#include "corrnet/rng.hpp"
#include "corrnet/saa_solver.hpp"

#ifndef CORRNET_VERSION
#define CORRNET_VERSION "unknown"
#endif

namespace corrnet {

std::string_view to_string(SamplerKind kind) { return kind == SamplerKind::kGibbs ? "gibbs" : "xor"; }

SamplerKind parse_sampler(std::string_view name) {
  if (name == "gibbs") return SamplerKind::kGibbs;
  if (name == "xor") return SamplerKind::kXor;
  fail(ErrorCode::kInvalidArgument, "unknown sampler \"" + std::string(name) + "\"");
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) fail(ErrorCode::kInvalidArgument, "cannot format number");
  return std::string(buf, end);
}

SliceSystem slices_for(const Mrf& mrf, EnumerationOptions options) {
  if (mrf.variable_count() <= options.cap) return build_slices(mrf, std::nullopt, options);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t f = 0; f < mrf.factor_count(); ++f) {
    lo += mrf.min_log_entry(f);
    hi += mrf.max_log_entry(f);
  }
  return build_slices(mrf, std::make_pair(std::exp(lo), std::exp(hi)), options);
}

std::vector<Scenario> draw_scenarios(const Mrf& mrf, const Network& network, SamplerKind kind, std::size_t n,
                                     std::uint64_t seed, const SamplerSettings& settings,
                                     const SliceSystem* slices) {
  const std::vector<std::size_t> map = align_variables(mrf, network);
  std::vector<Scenario> raw;
  if (kind == SamplerKind::kGibbs) {
    GibbsConfig config = settings.gibbs;
    config.seed = seed;
    raw = gibbs_sample(mrf, config, n);
  } else {
    XorConfig config = settings.xor_config;
    config.seed = seed;
    if (slices) {
      raw = xor_sample_weighted(mrf, *slices, config, n);
    } else {
      raw = xor_sample_weighted(mrf, slices_for(mrf), config, n);
    }
  }
  std::vector<Scenario> out;
  out.reserve(raw.size());
  for (const Scenario& s : raw) out.push_back(to_network_order(s, map));
  return out;
}

namespace {

// Welford running mean and variance.
struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  double sample_variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

Moments sampled_moments(const Mrf& mrf, const Network& network, const Policy& policy, std::size_t m,
                        std::uint64_t seed, const McOptions& options) {
  if (m == 0) fail(ErrorCode::kInvalidArgument, "Monte Carlo sample count must be positive");
  const std::vector<Scenario> draws = draw_scenarios(mrf, network, options.sampler, m, seed, options.settings);
  const std::vector<std::uint8_t> shield = protected_variables(network, policy);
  ReachabilityEvaluator eval(network);
  std::vector<std::uint8_t> present(shield.size());
  Moments moments;
  for (const Scenario& s : draws) {
    for (std::size_t i = 0; i < present.size(); ++i) present[i] = s.states[i] | shield[i];
    moments.add(eval(present));
  }
  return moments;
}

}  // namespace

McEstimate estimate_policy_value_mc(const Mrf& mrf, const Network& network, const Policy& policy, std::size_t m,
                                    std::uint64_t seed, const McOptions& options) {
  Moments moments = sampled_moments(mrf, network, policy, m, seed, options);
  return {moments.mean, std::sqrt(moments.sample_variance() / static_cast<double>(m)),
          std::string(to_string(options.sampler))};
}

std::vector<double> convergence_diagnostic(const Mrf& mrf, const Network& network, const Policy& policy,
                                           const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                           const McOptions& options) {
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) fail(ErrorCode::kInvalidArgument, "size sequence must be increasing");
  }
  std::vector<double> means;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    means.push_back(sampled_moments(mrf, network, policy, sizes[i], derive_seed(seed, i), options).mean);
  }
  std::vector<double> diffs;
  for (std::size_t i = 1; i < means.size(); ++i) diffs.push_back(means[i] - means[i - 1]);
  return diffs;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (samplers.empty() || sample_sizes.empty() || budgets.empty()) {
    fail(ErrorCode::kInvalidArgument, "samplers, sample_sizes and budgets must be non-empty");
  }
  if (replicates < 1) fail(ErrorCode::kInvalidArgument, "replicates must be at least 1");
  for (std::size_t n : sample_sizes) {
    if (n < 1) fail(ErrorCode::kInvalidArgument, "sample sizes must be positive");
  }
  for (double b : budgets) {
    if (!(b >= 0.0 && b <= 1.0)) fail(ErrorCode::kInvalidArgument, "budget fractions must lie in [0, 1]");
  }
  if (evaluation == Evaluation::kMonteCarlo && mc_samples < 1) {
    fail(ErrorCode::kInvalidArgument, "mc_samples must be at least 1");
  }
  if (settings.gibbs.thinning < 1) fail(ErrorCode::kInvalidArgument, "thinning must be at least 1");
}

namespace {

std::string_view to_string(ExperimentConfig::Evaluation e) {
  return e == ExperimentConfig::Evaluation::kExact ? "exact" : "monte_carlo";
}

std::string_view to_string(ExperimentConfig::Solver s) {
  switch (s) {
    case ExperimentConfig::Solver::kExact: return "exact";
    case ExperimentConfig::Solver::kGreedy: return "greedy";
    default: return "auto";
  }
}

template <typename T>
T get(const Json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("config field \"") + key + "\": " + e.what());
  }
}

void reject_unknown(const Json& doc, std::initializer_list<std::string_view> known, const char* where) {
  for (const auto& item : doc.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      fail(ErrorCode::kInvalidArgument, std::string("unknown ") + where + " field \"" + item.key() + "\"");
    }
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail(ErrorCode::kInvalidArgument, "config must be a JSON object");
  reject_unknown(doc,
                 {"network", "mrf", "sampler", "samplers", "sample_sizes", "budgets", "replicates", "evaluation",
                  "mc_samples", "mc_sampler", "solver", "exact_cap", "seed", "record_runtime", "gibbs", "xor"},
                 "config");
  ExperimentConfig c;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  if (doc.contains("network")) c.network_path = resolve(get<std::string>(doc, "network"));
  if (doc.contains("mrf")) c.mrf_path = resolve(get<std::string>(doc, "mrf"));
  if (doc.contains("sampler") && doc.contains("samplers")) {
    fail(ErrorCode::kInvalidArgument, "give either \"sampler\" or \"samplers\", not both");
  }
  if (doc.contains("sampler")) c.samplers = {parse_sampler(get<std::string>(doc, "sampler"))};
  if (doc.contains("samplers")) {
    c.samplers.clear();
    for (const auto& s : get<std::vector<std::string>>(doc, "samplers")) c.samplers.push_back(parse_sampler(s));
  }
  if (doc.contains("sample_sizes")) c.sample_sizes = get<std::vector<std::size_t>>(doc, "sample_sizes");
  if (doc.contains("budgets")) c.budgets = get<std::vector<double>>(doc, "budgets");
  if (doc.contains("replicates")) c.replicates = get<std::size_t>(doc, "replicates");
  if (doc.contains("evaluation")) {
    auto e = get<std::string>(doc, "evaluation");
    if (e == "exact") {
      c.evaluation = ExperimentConfig::Evaluation::kExact;
    } else if (e == "monte_carlo") {
      c.evaluation = ExperimentConfig::Evaluation::kMonteCarlo;
    } else {
      fail(ErrorCode::kInvalidArgument, "evaluation must be \"exact\" or \"monte_carlo\"");
    }
  }
  if (doc.contains("mc_samples")) c.mc_samples = get<std::size_t>(doc, "mc_samples");
  if (doc.contains("mc_sampler")) c.mc.sampler = parse_sampler(get<std::string>(doc, "mc_sampler"));
  if (doc.contains("solver")) {
    auto s = get<std::string>(doc, "solver");
    if (s == "auto") {
      c.solver = ExperimentConfig::Solver::kAuto;
    } else if (s == "exact") {
      c.solver = ExperimentConfig::Solver::kExact;
    } else if (s == "greedy") {
      c.solver = ExperimentConfig::Solver::kGreedy;
    } else {
      fail(ErrorCode::kInvalidArgument, "solver must be \"auto\", \"exact\" or \"greedy\"");
    }
  }
  if (doc.contains("exact_cap")) c.exact_cap = get<std::size_t>(doc, "exact_cap");
  if (doc.contains("seed")) c.seed = get<std::uint64_t>(doc, "seed");
  if (doc.contains("record_runtime")) c.record_runtime = get<bool>(doc, "record_runtime");
  if (doc.contains("gibbs")) {
    const Json& g = doc.at("gibbs");
    reject_unknown(g, {"burn_in", "thinning"}, "gibbs");
    if (g.contains("burn_in")) c.settings.gibbs.burn_in = get<std::size_t>(g, "burn_in");
    if (g.contains("thinning")) c.settings.gibbs.thinning = get<std::size_t>(g, "thinning");
  }
  if (doc.contains("xor")) {
    const Json& x = doc.at("xor");
    reject_unknown(x, {"max_retries", "bit_cap", "node_limit"}, "xor");
    if (x.contains("max_retries")) c.settings.xor_config.max_retries = get<std::size_t>(x, "max_retries");
    if (x.contains("bit_cap")) c.settings.xor_config.search.bit_cap = get<std::size_t>(x, "bit_cap");
    if (x.contains("node_limit")) c.settings.xor_config.search.node_limit = get<std::uint64_t>(x, "node_limit");
  }
  c.mc.settings = c.settings;
  c.validate();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json doc;
  doc["network"] = c.network_path.generic_string();
  doc["mrf"] = c.mrf_path.generic_string();
  Json samplers = Json::array();
  for (SamplerKind k : c.samplers) samplers.push_back(std::string(to_string(k)));
  doc["samplers"] = std::move(samplers);
  doc["sample_sizes"] = c.sample_sizes;
  doc["budgets"] = c.budgets;
  doc["replicates"] = c.replicates;
  doc["evaluation"] = std::string(to_string(c.evaluation));
  doc["mc_samples"] = c.mc_samples;
  doc["mc_sampler"] = std::string(to_string(c.mc.sampler));
  doc["solver"] = std::string(to_string(c.solver));
  doc["exact_cap"] = c.exact_cap;
  doc["seed"] = c.seed;
  doc["record_runtime"] = c.record_runtime;
  doc["gibbs"] = {{"burn_in", c.settings.gibbs.burn_in}, {"thinning", c.settings.gibbs.thinning}};
  doc["xor"] = {{"max_retries", c.settings.xor_config.max_retries},
                {"bit_cap", c.settings.xor_config.search.bit_cap},
                {"node_limit", c.settings.xor_config.search.node_limit}};
  return doc;
}

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

std::uint64_t replicate_seed(std::uint64_t master, SamplerKind sampler, std::size_t n, double budget_fraction,
                             std::size_t replicate) {
  std::uint64_t s = derive_seed(master, static_cast<std::uint64_t>(sampler));
  s = derive_seed(s, n);
  s = derive_seed(s, std::bit_cast<std::uint64_t>(budget_fraction));
  return derive_seed(s, replicate);
}

namespace {

struct SharedState {
  const ExactDistribution* exact = nullptr;
  const SliceSystem* slices = nullptr;
  std::map<Policy, double> exact_values;
};

// Errors are recorded in the row.
ReplicateRow run_replicate(const ExperimentConfig& config, const Network& network, const Mrf& mrf,
                           SharedState& shared, SamplerKind sampler, std::size_t n, double budget_fraction,
                           std::size_t replicate) {
  ReplicateRow row;
  row.sampler = sampler;
  row.n_samples = n;
  row.budget_fraction = budget_fraction;
  row.replicate = replicate;
  row.seed = replicate_seed(config.seed, sampler, n, budget_fraction, replicate);
  row.value_mode = std::string(to_string(config.evaluation));

  const bool use_exact = config.solver == ExperimentConfig::Solver::kExact ||
                         (config.solver == ExperimentConfig::Solver::kAuto &&
                          network.actions().size() <= config.exact_cap);
  row.solver = use_exact ? "exact" : "greedy";
  try {
    const auto start = std::chrono::steady_clock::now();
    SaaInstance instance{network,
                         draw_scenarios(mrf, network, sampler, n, derive_seed(row.seed, 0), config.settings,
                                        shared.slices),
                         budget_fraction * network.total_action_cost()};
    SolverOptions options;
    options.exact_cap = std::max(options.exact_cap, config.exact_cap);
    SolveResult solved = use_exact ? solve_exact(instance, {}, options) : solve_greedy(instance, {}, options);
    row.policy = solved.policy;
    if (config.record_runtime) {
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    if (config.evaluation == ExperimentConfig::Evaluation::kExact) {
      if (!shared.exact) fail(ErrorCode::kEnumerationTooLarge, "exact evaluation needs an enumerable MRF");
      auto [it, fresh] = shared.exact_values.try_emplace(row.policy, 0.0);
      if (fresh) it->second = shared.exact->policy_value(network, row.policy);
      row.value = it->second;
    } else {
      McEstimate est =
          estimate_policy_value_mc(mrf, network, row.policy, config.mc_samples, derive_seed(row.seed, 1), config.mc);
      row.value = est.estimate;
      row.standard_error = est.standard_error;
    }
  } catch (const Error& e) {
    row.value.reset();
    row.error_code = std::string(to_string(e.code()));
  } catch (const std::exception&) {
    row.value.reset();
    row.error_code = "internal_error";
  }
  return row;
}

}  // namespace

std::vector<CellSummary> summarize(const std::vector<ReplicateRow>& rows) {
  std::vector<CellSummary> cells;
  for (const ReplicateRow& r : rows) {
    if (cells.empty() || cells.back().sampler != r.sampler || cells.back().n_samples != r.n_samples ||
        cells.back().budget_fraction != r.budget_fraction) {
      cells.push_back({r.sampler, r.n_samples, r.budget_fraction, {}, 0.0, 0.0});
    }
    if (r.value) cells.back().values.push_back(*r.value);
  }
  for (CellSummary& c : cells) {
    if (c.values.empty()) continue;
    // Shifted by the first value, so constant cells give exactly 0.
    const double count = static_cast<double>(c.values.size());
    const double shift = c.values.front();
    double sum = 0.0;
    for (double v : c.values) sum += v - shift;
    const double offset = sum / count;
    c.mean = shift + offset;
    double ss = 0.0;
    for (double v : c.values) ss += (v - shift - offset) * (v - shift - offset);
    c.std_population = std::sqrt(ss / count);
  }
  return cells;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Network& network, const Mrf& mrf) {
  config.validate();
  align_variables(mrf, network);

  std::vector<SamplerKind> samplers = config.samplers;
  std::sort(samplers.begin(), samplers.end(),
            [](SamplerKind a, SamplerKind b) { return to_string(a) < to_string(b); });
  samplers.erase(std::unique(samplers.begin(), samplers.end()), samplers.end());
  std::set<std::size_t> sizes(config.sample_sizes.begin(), config.sample_sizes.end());
  std::set<double> budgets(config.budgets.begin(), config.budgets.end());

  std::optional<ExactDistribution> exact;
  if (config.evaluation == ExperimentConfig::Evaluation::kExact) {
    try {
      exact.emplace(mrf);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEnumerationTooLarge) throw;
    }
  }
  std::optional<SliceSystem> slices;
  std::string slice_error;
  if (std::find(samplers.begin(), samplers.end(), SamplerKind::kXor) != samplers.end()) {
    try {
      slices = slices_for(mrf);
    } catch (const Error& e) {
      slice_error = std::string(to_string(e.code()));
    }
  }

  SharedState shared;
  shared.exact = exact ? &*exact : nullptr;
  shared.slices = slices ? &*slices : nullptr;
  ExperimentResult result;
  for (SamplerKind sampler : samplers) {
    for (std::size_t n : sizes) {
      for (double b : budgets) {
        for (std::size_t r = 0; r < config.replicates; ++r) {
          if (sampler == SamplerKind::kXor && !slices) {
            ReplicateRow row;
            row.sampler = sampler;
            row.n_samples = n;
            row.budget_fraction = b;
            row.replicate = r;
            row.seed = replicate_seed(config.seed, sampler, n, b, r);
            row.value_mode = std::string(to_string(config.evaluation));
            row.error_code = slice_error;
            result.rows.push_back(std::move(row));
            continue;
          }
          result.rows.push_back(run_replicate(config, network, mrf, shared, sampler, n, b, r));
        }
      }
    }
  }
  result.cells = summarize(result.rows);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, read_network(config.network_path), read_mrf(config.mrf_path));
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

std::string results_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "sampler,n_samples,budget_fraction,replicate,policy_actions,value,value_mode,stderr,runtime_ms,error_code\n";
  for (const ReplicateRow& r : result.rows) {
    std::string actions;
    for (ActionId a : r.policy.actions()) {
      if (!actions.empty()) actions += ';';
      actions += std::to_string(a);
    }
    out << to_string(r.sampler) << ',' << r.n_samples << ',' << format_double(r.budget_fraction) << ','
        << r.replicate << ',' << actions << ',' << (r.value ? format_double(*r.value) : "") << ',' << r.value_mode
        << ',' << (r.value ? format_double(r.standard_error) : "") << ','
        << (r.runtime_ms ? format_double(*r.runtime_ms) : "") << ',' << r.error_code << '\n';
  }
  return out.str();
}

std::string summary_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "sampler,n_samples,budget_fraction,replicates_ok,mean,std_population\n";
  for (const CellSummary& c : result.cells) {
    out << to_string(c.sampler) << ',' << c.n_samples << ',' << format_double(c.budget_fraction) << ','
        << c.values.size() << ',' << (c.values.empty() ? "" : format_double(c.mean)) << ','
        << (c.values.empty() ? "" : format_double(c.std_population)) << '\n';
  }
  return out.str();
}

namespace {

std::string fixed(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string results_svg(const ExperimentResult& result) {
  constexpr double kWidth = 760, kHeight = 480, kLeft = 70, kRight = 190, kTop = 30, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::map<std::pair<std::string, double>, std::vector<const CellSummary*>> series;
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const CellSummary& c : result.cells) {
    if (c.values.empty()) continue;
    series[{std::string(to_string(c.sampler)), c.budget_fraction}].push_back(&c);
    x_lo = std::min(x_lo, static_cast<double>(c.n_samples));
    x_hi = std::max(x_hi, static_cast<double>(c.n_samples));
    y_lo = std::min(y_lo, c.mean - c.std_population);
    y_hi = std::max(y_hi, c.mean + c.std_population);
  }
  if (series.empty()) {
    x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  }
  if (x_hi == x_lo) x_lo -= 1, x_hi += 1;
  if (y_hi == y_lo) y_lo -= 1, y_hi += 1;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = y_lo + (y_hi - y_lo) * t / 4.0;
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(py(y) + 4) << "\" text-anchor=\"end\">" << fixed(y)
        << "</text>\n";
  }
  std::set<std::size_t> ticks;
  for (const CellSummary& c : result.cells) ticks.insert(c.n_samples);
  for (std::size_t n : ticks) {
    svg << "<text x=\"" << fixed(px(static_cast<double>(n))) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << n << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">samples N</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" transform=\"rotate(-90 16 " << kTop + plot_h / 2
      << ")\" text-anchor=\"middle\">policy value (mean \xC2\xB1 std)</text>\n";

  std::size_t index = 0;
  for (const auto& [key, cells] : series) {
    const char* color = kColors[index % std::size(kColors)];
    const char* dash = key.first == "gibbs" ? " stroke-dasharray=\"5,3\"" : "";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\"" << dash << " points=\"";
    for (const CellSummary* c : cells) {
      svg << fixed(px(static_cast<double>(c->n_samples))) << ',' << fixed(py(c->mean)) << ' ';
    }
    svg << "\"/>\n";
    for (const CellSummary* c : cells) {
      const double x = px(static_cast<double>(c->n_samples));
      svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(py(c->mean - c->std_population)) << "\" x2=\""
          << fixed(x) << "\" y2=\"" << fixed(py(c->mean + c->std_population)) << "\" stroke=\"" << color
          << "\"/>\n";
      svg << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(py(c->mean)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(index);
    svg << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << fixed(ly) << "\" x2=\"" << kWidth - kRight + 40
        << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\"" << dash << "/>\n";
    svg << "<text x=\"" << kWidth - kRight + 46 << "\" y=\"" << fixed(ly + 4) << "\">" << key.first
        << " budget " << fixed(100.0 * key.second, 0) << "%</text>\n";
    ++index;
  }
  svg << "</svg>\n";
  return svg.str();
}

Json manifest_json(const ExperimentConfig& config, const ExperimentResult& result) {
  Json doc;
  doc["tool"] = "corrnet";
  doc["version"] = CORRNET_VERSION;
  doc["config"] = to_json(config);
  doc["std_formula"] = "population";
  doc["runtime_note"] = "runtime_ms covers sampling and the internal solver only";
  Json cells = Json::array();
  for (std::size_t i = 0; i < result.rows.size();) {
    const ReplicateRow& first = result.rows[i];
    Json cell{{"sampler", std::string(to_string(first.sampler))},
              {"n_samples", first.n_samples},
              {"budget_fraction", first.budget_fraction},
              {"solver", first.solver}};
    Json seeds = Json::array();
    for (; i < result.rows.size() && result.rows[i].sampler == first.sampler &&
           result.rows[i].n_samples == first.n_samples && result.rows[i].budget_fraction == first.budget_fraction;
         ++i) {
      seeds.push_back(result.rows[i].seed);
    }
    cell["replicate_seeds"] = std::move(seeds);
    cells.push_back(std::move(cell));
  }
  doc["cells"] = std::move(cells);
  return doc;
}

void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                              const ExperimentResult& result) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) fail(ErrorCode::kStructural, "cannot write " + (dir / name).string());
    out << text;
  };
  write("results.csv", results_csv(result));
  write("summary.csv", summary_csv(result));
  write("results.svg", results_svg(result));
  write_json(dir / "manifest.json", manifest_json(config, result));
}

}  // namespace corrnet
