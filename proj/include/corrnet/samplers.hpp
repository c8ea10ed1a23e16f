#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "corrnet/graph_model.hpp"
#include "corrnet/mrf.hpp"
#include "corrnet/parity.hpp"

namespace corrnet {

// ---------------------------------------------------------------------------
// Gibbs
// ---------------------------------------------------------------------------

struct GibbsConfig {
  enum class Init { kAllOnes, kAllZeros, kRandom };

  std::size_t burn_in = 1000;  // sweeps
  std::size_t thinning = 10;   // sweeps between emitted samples
  std::uint64_t seed = 0;
  Init init = Init::kAllOnes;
};

/// Pr(theta_var = 1 | all other variables), using only the factors that touch
/// `var` (an MRF variable position).
double gibbs_conditional(const Mrf& mrf, const Scenario& scenario, std::size_t var);

/// Single chain, systematic scan in variable order. Requires strictly positive
/// potentials. Deterministic in the seed.
std::vector<Scenario> gibbs_sample(const Mrf& mrf, const GibbsConfig& config, std::size_t n);

// ---------------------------------------------------------------------------
// Horizontal slices
// ---------------------------------------------------------------------------

/// Embeds the weighted distribution into the unweighted set of pairs
/// (theta, delta), delta in {0,1}^k, where delta_i may be 1 only when
/// P~(theta) > 2^(i+1) * base. Theta's multiplicity in the set is 2^level.
struct SliceSystem {
  double log_base = 0.0;   // ln P_0
  double log_upper = 0.0;  // ln P_max
  std::size_t slice_count = 0;
  /// log2 of the embedded set size, when it was enumerated.
  std::optional<double> log2_size;

  /// Number of auxiliary bits that may be set: #{i < k : P~ > 2^(i+1) P_0}.
  /// Boundary ties count as "not above". Throws kBoundViolation when the
  /// density falls outside [P_0, P_max].
  std::size_t level(double log_density) const;
  std::uint64_t multiplicity(double log_density) const { return std::uint64_t{1} << level(log_density); }
  bool contains(double log_density, std::span<const std::uint8_t> delta) const;
};

/// Bounds are (P_0, P_max) in the linear domain. Without bounds the exact
/// extrema are found by enumeration.
SliceSystem build_slices(const Mrf& mrf, std::optional<std::pair<double, double>> bounds = std::nullopt,
                         EnumerationOptions options = {});

/// Search domain over (theta, delta) for a sliced MRF.
class SliceDomain final : public SearchDomain {
 public:
  SliceDomain(const Mrf& mrf, SliceSystem slices);
  ~SliceDomain() override;

  std::size_t variable_count() const override;
  std::size_t slice_count() const override { return slices_.slice_count; }
  std::optional<LevelRange> levels(std::span<const std::uint8_t> prefix) const override;
  std::optional<double> log2_size() const override { return slices_.log2_size; }

 private:
  struct Bounds;
  const Mrf* mrf_;
  SliceSystem slices_;
  std::unique_ptr<Bounds> bounds_;
};

/// Unweighted domain over the support {theta : P~(theta) > 0} of an MRF.
class SupportDomain final : public SearchDomain {
 public:
  explicit SupportDomain(const Mrf& mrf);
  ~SupportDomain() override;

  std::size_t variable_count() const override;
  std::size_t slice_count() const override { return 0; }
  std::optional<LevelRange> levels(std::span<const std::uint8_t> prefix) const override;

 private:
  struct Bounds;
  const Mrf* mrf_;
  std::unique_ptr<Bounds> bounds_;
};

// ---------------------------------------------------------------------------
// XOR sampling
// ---------------------------------------------------------------------------

struct XorConfig {
  std::uint64_t seed = 0;
  std::size_t max_retries = 2000;
  /// Row count for the first attempt of every sample. Defaults to
  /// round(log2 |set|) when the domain knows its size, else bits / 2.
  std::optional<std::size_t> initial_rows;
  SearchLimits search;
};

struct XorStats {
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;
  std::uint64_t empty = 0;     // attempts with no survivor
  std::uint64_t multiple = 0;  // attempts with two or more survivors
  std::uint64_t nodes = 0;     // parity search nodes, summed
};

/// Near-uniform samples from the set described by `domain`: add random XOR
/// rows, accept only when exactly one assignment survives. On zero survivors
/// drop a row, on several add one, redraw and retry. Sample j uses its own
/// seed stream, so the output does not depend on how samples are scheduled.
std::vector<std::vector<std::uint8_t>> xor_sample_unweighted(const SearchDomain& domain,
                                                             const XorConfig& config, std::size_t n,
                                                             XorStats* stats = nullptr);

/// XOR sampling over the sliced set, projected onto theta.
std::vector<Scenario> xor_sample_weighted(const Mrf& mrf, const SliceSystem& slices,
                                          const XorConfig& config, std::size_t n,
                                          XorStats* stats = nullptr);

}  // namespace corrnet
