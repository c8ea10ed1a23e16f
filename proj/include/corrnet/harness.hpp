#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrnet/graph_model.hpp"
#include "corrnet/io.hpp"
#include "corrnet/mrf.hpp"
#include "corrnet/samplers.hpp"

namespace corrnet {

enum class SamplerKind { kGibbs, kXor };

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler(std::string_view name);

struct SamplerSettings {
  GibbsConfig gibbs;  // seed is overridden per draw
  XorConfig xor_config;
};

/// Draws n scenarios from the MRF, returned in network variable order.
/// `slices` is required for the XOR path; pass build_slices(mrf) or a cached copy.
std::vector<Scenario> draw_scenarios(const Mrf& mrf, const Network& network, SamplerKind kind, std::size_t n,
                                     std::uint64_t seed, const SamplerSettings& settings,
                                     const SliceSystem* slices = nullptr);

/// Slice system for the XOR path: exact extrema when the MRF is enumerable,
/// otherwise the products of per-factor extrema.
SliceSystem slices_for(const Mrf& mrf, EnumerationOptions options = {});

struct McOptions {
  SamplerKind sampler = SamplerKind::kGibbs;
  SamplerSettings settings;
};

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;  // sample std / sqrt(M); 0 when M = 1
  std::string sampler;
};

McEstimate estimate_policy_value_mc(const Mrf& mrf, const Network& network, const Policy& policy, std::size_t m,
                                    std::uint64_t seed, const McOptions& options = {});

/// Successive differences of fresh-batch means: entry i-1 is
/// mean(N_i) - mean(N_{i-1}). Batch i is drawn with derive_seed(seed, i).
std::vector<double> convergence_diagnostic(const Mrf& mrf, const Network& network, const Policy& policy,
                                           const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                           const McOptions& options = {});

struct ExperimentConfig {
  enum class Evaluation { kExact, kMonteCarlo };
  enum class Solver { kAuto, kExact, kGreedy };

  std::filesystem::path network_path;
  std::filesystem::path mrf_path;
  std::vector<SamplerKind> samplers{SamplerKind::kGibbs};
  std::vector<std::size_t> sample_sizes{10};
  std::vector<double> budgets{0.1};  // fractions of total action cost
  std::size_t replicates = 10;
  Evaluation evaluation = Evaluation::kExact;
  std::size_t mc_samples = 5000;
  McOptions mc;  // sampler used for Monte Carlo evaluation
  SamplerSettings settings;
  Solver solver = Solver::kAuto;
  std::size_t exact_cap = 30;
  std::uint64_t seed = 0;
  /// Wall-clock time makes the CSV non-reproducible, so it is opt-in.
  bool record_runtime = false;

  /// Throws kInvalidArgument on empty lists or out-of-range values.
  void validate() const;
};

/// Reads a JSON config. Relative instance paths resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
Json to_json(const ExperimentConfig& config);

/// Seed of replicate r in cell (sampler, N, budget fraction).
std::uint64_t replicate_seed(std::uint64_t master, SamplerKind sampler, std::size_t n, double budget_fraction,
                             std::size_t replicate);

struct ReplicateRow {
  SamplerKind sampler = SamplerKind::kGibbs;
  std::size_t n_samples = 0;
  double budget_fraction = 0.0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  Policy policy;
  std::optional<double> value;
  std::string value_mode;
  double standard_error = 0.0;
  std::optional<double> runtime_ms;
  std::string solver;
  std::string error_code;  // empty on success
};

struct CellSummary {
  SamplerKind sampler = SamplerKind::kGibbs;
  std::size_t n_samples = 0;
  double budget_fraction = 0.0;
  std::vector<double> values;  // successful replicates, in replicate order
  double mean = 0.0;
  double std_population = 0.0;
};

struct ExperimentResult {
  std::vector<ReplicateRow> rows;  // sorted by (sampler, N, budget, replicate)
  std::vector<CellSummary> cells;
};

/// Population mean and std of the successful rows of each cell.
std::vector<CellSummary> summarize(const std::vector<ReplicateRow>& rows);

ExperimentResult run_experiment(const ExperimentConfig& config, const Network& network, const Mrf& mrf);
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string results_csv(const ExperimentResult& result);
std::string summary_csv(const ExperimentResult& result);
std::string results_svg(const ExperimentResult& result);
Json manifest_json(const ExperimentConfig& config, const ExperimentResult& result);

/// Writes results.csv, summary.csv, results.svg and manifest.json into `dir`.
void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                              const ExperimentResult& result);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

}  // namespace corrnet
