#include "corrnet/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "corrnet/error.hpp"
#include "corrnet/rng.hpp"

namespace corrnet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Relative tolerance on density comparisons against slice boundaries, in log2 units.
const double kLog2Tol = std::log2(1.0 + 1e-12);

}  // namespace

// ---------------------------------------------------------------------------
// Gibbs
// ---------------------------------------------------------------------------

namespace {

// Log densities of the two settings of `var`, restricted to incident factors.
std::pair<double, double> local_log_densities(const Mrf& mrf, std::vector<std::uint8_t>& states,
                                              std::size_t var) {
  const std::uint8_t saved = states[var];
  double l0 = 0.0;
  double l1 = 0.0;
  for (std::size_t f : mrf.factors_of(var)) {
    states[var] = 0;
    l0 += mrf.log_table(f)[mrf.table_index(f, states)];
    states[var] = 1;
    l1 += mrf.log_table(f)[mrf.table_index(f, states)];
  }
  states[var] = saved;
  return {l0, l1};
}

double conditional_from_logs(double l0, double l1) {
  if (l0 == kNegInf && l1 == kNegInf) {
    fail(ErrorCode::kNonErgodic, "both settings of the variable have zero density");
  }
  if (l1 == kNegInf) return 0.0;
  if (l0 == kNegInf) return 1.0;
  return 1.0 / (1.0 + std::exp(l0 - l1));
}

}  // namespace

double gibbs_conditional(const Mrf& mrf, const Scenario& scenario, std::size_t var) {
  check_scenario(mrf, scenario);
  if (var >= mrf.variable_count()) fail(ErrorCode::kVariableMismatch, "variable index out of range");
  std::vector<std::uint8_t> states = scenario.states;
  auto [l0, l1] = local_log_densities(mrf, states, var);
  return conditional_from_logs(l0, l1);
}

std::vector<Scenario> gibbs_sample(const Mrf& mrf, const GibbsConfig& config, std::size_t n) {
  if (config.thinning < 1) fail(ErrorCode::kInvalidArgument, "thinning must be at least 1");
  if (auto f = mrf.first_zero_factor()) {
    fail(ErrorCode::kPositivity,
         "factor " + std::to_string(*f) + " has a zero entry; Gibbs needs strictly positive potentials");
  }
  Rng rng(config.seed);
  const std::size_t vars = mrf.variable_count();
  std::vector<std::uint8_t> states(vars, config.init == GibbsConfig::Init::kAllZeros ? 0 : 1);
  if (config.init == GibbsConfig::Init::kRandom) {
    for (auto& s : states) s = rng.next() & 1U;
  }
  auto sweep = [&] {
    for (std::size_t v = 0; v < vars; ++v) {
      auto [l0, l1] = local_log_densities(mrf, states, v);
      states[v] = rng.uniform() < conditional_from_logs(l0, l1) ? 1 : 0;
    }
  };
  for (std::size_t i = 0; i < config.burn_in; ++i) sweep();
  std::vector<Scenario> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < config.thinning; ++t) sweep();
    out.push_back(Scenario{states});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slices
// ---------------------------------------------------------------------------

namespace {

std::size_t raw_level(double log2_ratio, std::size_t k) {
  const double x = log2_ratio - 1.0 - kLog2Tol;
  if (!(x > 0.0)) return 0;
  return std::min(k, static_cast<std::size_t>(std::ceil(x)));
}

}  // namespace

std::size_t SliceSystem::level(double log_density) const {
  const double ratio = (log_density - log_base) / std::numbers::ln2;
  const double upper = (log_upper - log_base) / std::numbers::ln2;
  if (ratio < -kLog2Tol) {
    fail(ErrorCode::kBoundViolation, "density below the slice base P_0");
  }
  if (ratio > upper + kLog2Tol) {
    fail(ErrorCode::kBoundViolation, "density above the slice bound P_max");
  }
  return raw_level(ratio, slice_count);
}

bool SliceSystem::contains(double log_density, std::span<const std::uint8_t> delta) const {
  const std::size_t m = level(log_density);
  for (std::size_t i = m; i < slice_count; ++i) {
    if (delta[i]) return false;
  }
  return true;
}

SliceSystem build_slices(const Mrf& mrf, std::optional<std::pair<double, double>> bounds,
                         EnumerationOptions options) {
  const std::size_t n = mrf.variable_count();
  const bool enumerable = n <= options.cap && n <= 62;
  if (!bounds && !enumerable) {
    fail(ErrorCode::kEnumerationTooLarge,
         "slice bounds are required above the enumeration cap (" + std::to_string(n) + " variables)");
  }
  SliceSystem slices;
  std::vector<double> logs;
  if (enumerable) {
    logs.resize(std::size_t{1} << n);
    for (std::uint64_t mask = 0; mask < logs.size(); ++mask) logs[mask] = mrf.log_density(mask);
  }
  if (bounds) {
    if (!(bounds->first > 0.0) || !(bounds->second >= bounds->first) || !std::isfinite(bounds->second)) {
      fail(ErrorCode::kInvalidArgument, "slice bounds must satisfy 0 < P_0 <= P_max");
    }
    slices.log_base = std::log(bounds->first);
    slices.log_upper = std::log(bounds->second);
  } else {
    auto [lo, hi] = std::minmax_element(logs.begin(), logs.end());
    if (*lo == kNegInf) {
      fail(ErrorCode::kBoundViolation, "weighted slicing needs a strictly positive density");
    }
    slices.log_base = *lo;
    slices.log_upper = *hi;
  }
  const double span = (slices.log_upper - slices.log_base) / std::numbers::ln2;
  slices.slice_count = span > kLog2Tol ? static_cast<std::size_t>(std::ceil(span - kLog2Tol)) : 0;
  if (enumerable) {
    double size = 0.0;
    for (double lp : logs) size += static_cast<double>(slices.multiplicity(lp));
    slices.log2_size = std::log2(size);
  }
  return slices;
}

// Prefix bounds on the log density. Each factor's scope is sorted by variable
// position, so the assigned members for a theta prefix are a prefix of that
// order; per-prefix max/min tables make each bound O(total scope size).
struct PrefixBounds {
  struct FactorBounds {
    std::vector<std::size_t> sorted_scope;
    std::vector<std::vector<double>> max_by_prefix;  // [t][pattern of first t]
    std::vector<std::vector<double>> min_by_prefix;
  };

  explicit PrefixBounds(const Mrf& mrf) {
    for (std::size_t f = 0; f < mrf.factor_count(); ++f) {
      const auto& scope = mrf.scope_indices(f);
      const std::size_t s = scope.size();
      std::vector<std::size_t> order(s);
      for (std::size_t j = 0; j < s; ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scope[a] < scope[b]; });
      FactorBounds fb;
      for (std::size_t j : order) fb.sorted_scope.push_back(scope[j]);
      fb.max_by_prefix.resize(s + 1);
      fb.min_by_prefix.resize(s + 1);
      auto& full_max = fb.max_by_prefix[s];
      full_max.resize(std::size_t{1} << s);
      for (std::size_t p = 0; p < full_max.size(); ++p) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < s; ++j) idx |= ((p >> j) & 1U) << order[j];
        full_max[p] = mrf.log_table(f)[idx];
      }
      fb.min_by_prefix[s] = full_max;
      for (std::size_t t = s; t-- > 0;) {
        const std::size_t width = std::size_t{1} << t;
        fb.max_by_prefix[t].resize(width);
        fb.min_by_prefix[t].resize(width);
        for (std::size_t p = 0; p < width; ++p) {
          fb.max_by_prefix[t][p] = std::max(fb.max_by_prefix[t + 1][p], fb.max_by_prefix[t + 1][p | width]);
          fb.min_by_prefix[t][p] = std::min(fb.min_by_prefix[t + 1][p], fb.min_by_prefix[t + 1][p | width]);
        }
      }
      factors.push_back(std::move(fb));
    }
  }

  /// (lower, upper) bound on the log density over completions of `prefix`.
  std::pair<double, double> operator()(std::span<const std::uint8_t> prefix) const {
    double lo = 0.0;
    double hi = 0.0;
    for (const FactorBounds& fb : factors) {
      std::size_t t = 0;
      std::size_t pattern = 0;
      while (t < fb.sorted_scope.size() && fb.sorted_scope[t] < prefix.size()) {
        pattern |= std::size_t{prefix[fb.sorted_scope[t]]} << t;
        ++t;
      }
      lo += fb.min_by_prefix[t][pattern];
      hi += fb.max_by_prefix[t][pattern];
    }
    return {lo, hi};
  }

  std::vector<FactorBounds> factors;
};

struct SliceDomain::Bounds : PrefixBounds {
  using PrefixBounds::PrefixBounds;
};
struct SupportDomain::Bounds : PrefixBounds {
  using PrefixBounds::PrefixBounds;
};

SliceDomain::SliceDomain(const Mrf& mrf, SliceSystem slices)
    : mrf_(&mrf), slices_(std::move(slices)), bounds_(std::make_unique<Bounds>(mrf)) {}
SliceDomain::~SliceDomain() = default;

std::size_t SliceDomain::variable_count() const { return mrf_->variable_count(); }

std::optional<LevelRange> SliceDomain::levels(std::span<const std::uint8_t> prefix) const {
  if (prefix.size() == mrf_->variable_count()) {
    const std::size_t m = slices_.level(mrf_->log_density(prefix));
    return LevelRange{m, m};
  }
  auto [lo, hi] = (*bounds_)(prefix);
  if (hi == kNegInf) return std::nullopt;
  const double base = slices_.log_base;
  const std::size_t k = slices_.slice_count;
  return LevelRange{raw_level((lo - base) / std::numbers::ln2, k), raw_level((hi - base) / std::numbers::ln2, k)};
}

SupportDomain::SupportDomain(const Mrf& mrf) : mrf_(&mrf), bounds_(std::make_unique<Bounds>(mrf)) {}
SupportDomain::~SupportDomain() = default;

std::size_t SupportDomain::variable_count() const { return mrf_->variable_count(); }

std::optional<LevelRange> SupportDomain::levels(std::span<const std::uint8_t> prefix) const {
  if ((*bounds_)(prefix).second == kNegInf) return std::nullopt;
  return LevelRange{0, 0};
}

// ---------------------------------------------------------------------------
// XOR sampling
// ---------------------------------------------------------------------------

std::vector<std::vector<std::uint8_t>> xor_sample_unweighted(const SearchDomain& domain,
                                                             const XorConfig& config, std::size_t n,
                                                             XorStats* stats) {
  if (config.max_retries < 1) fail(ErrorCode::kInvalidArgument, "max_retries must be at least 1");
  const std::size_t bits = domain.bit_count();
  std::size_t initial = bits / 2;
  if (config.initial_rows) {
    initial = *config.initial_rows;
  } else if (auto log2_size = domain.log2_size()) {
    initial = static_cast<std::size_t>(std::max(0.0, std::round(*log2_size)));
  }

  XorStats local;
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Rng rng(derive_seed(config.seed, j));
    std::size_t rows = initial;
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < config.max_retries && !accepted; ++attempt) {
      const ParitySystem parity = ParitySystem::random(bits, rows, rng);
      SearchStats search_stats;
      auto solutions = parity_solve(domain, parity, 2, config.search, &search_stats);
      ++local.attempts;
      local.nodes += search_stats.nodes;
      if (solutions.size() == 1) {
        ++local.accepted;
        out.push_back(std::move(solutions.front()));
        accepted = true;
      } else if (solutions.empty()) {
        ++local.empty;
        if (rows > 0) --rows;
      } else {
        ++local.multiple;
        ++rows;
      }
    }
    if (!accepted) {
      if (stats) *stats = local;
      fail(ErrorCode::kSamplingFailure,
           "no unique survivor after " + std::to_string(config.max_retries) + " XOR attempts");
    }
  }
  if (stats) *stats = local;
  return out;
}

std::vector<Scenario> xor_sample_weighted(const Mrf& mrf, const SliceSystem& slices,
                                          const XorConfig& config, std::size_t n, XorStats* stats) {
  SliceDomain domain(mrf, slices);
  auto raw = xor_sample_unweighted(domain, config, n, stats);
  std::vector<Scenario> out;
  out.reserve(raw.size());
  const std::size_t vars = mrf.variable_count();
  for (auto& bits : raw) {
    out.push_back(Scenario{std::vector<std::uint8_t>(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(vars))});
  }
  return out;
}

}  // namespace corrnet
