#include "corrnet/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "corrnet/detail/summation.hpp"
#include "corrnet/error.hpp"

namespace corrnet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_enumerable(std::size_t n, const EnumerationOptions& options) {
  if (n > options.cap || n > 62) {
    fail(ErrorCode::kEnumerationTooLarge,
         std::to_string(n) + " variables exceed the enumeration cap of " +
             std::to_string(std::min<std::size_t>(options.cap, 62)));
  }
}

std::vector<std::size_t> align(const std::vector<EdgeId>& variables, const Network& network) {
  if (variables.size() != network.variable_count()) {
    fail(ErrorCode::kVariableMismatch,
         "MRF has " + std::to_string(variables.size()) + " variables, network has " +
             std::to_string(network.variable_count()) + " stochastic edges");
  }
  std::vector<std::size_t> map(variables.size());
  std::vector<std::uint8_t> seen(variables.size(), 0);
  for (std::size_t i = 0; i < variables.size(); ++i) {
    std::size_t v;
    try {
      v = network.variable_index(variables[i]);
    } catch (const Error&) {
      fail(ErrorCode::kVariableMismatch,
           "MRF variable " + std::to_string(variables[i]) + " is not a stochastic edge");
    }
    if (seen[v]++) fail(ErrorCode::kVariableMismatch, "MRF variable repeated");
    map[i] = v;
  }
  return map;
}

}  // namespace

Mrf::Mrf(std::vector<EdgeId> variables, std::vector<Factor> factors)
    : variables_(std::move(variables)), factors_(std::move(factors)) {
  std::unordered_map<EdgeId, std::size_t> lookup;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (!lookup.emplace(variables_[i], i).second) {
      fail(ErrorCode::kStructural, "duplicate MRF variable " + std::to_string(variables_[i]));
    }
  }
  incidence_.resize(variables_.size());
  auto add_factor = [&](std::size_t f) {
    const Factor& factor = factors_[f];
    if (factor.scope.size() > 30 || factor.table.size() != (std::size_t{1} << factor.scope.size())) {
      fail(ErrorCode::kStructural,
           "factor " + std::to_string(f) + " table length does not match 2^|scope|");
    }
    std::vector<std::size_t> scope;
    for (EdgeId id : factor.scope) {
      auto it = lookup.find(id);
      if (it == lookup.end()) {
        fail(ErrorCode::kStructural,
             "factor " + std::to_string(f) + " references unknown variable " + std::to_string(id));
      }
      if (std::find(scope.begin(), scope.end(), it->second) != scope.end()) {
        fail(ErrorCode::kStructural, "factor " + std::to_string(f) + " repeats a variable");
      }
      scope.push_back(it->second);
    }
    std::vector<double> logs;
    logs.reserve(factor.table.size());
    bool any_positive = false;
    for (double v : factor.table) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        fail(ErrorCode::kStructural, "factor " + std::to_string(f) + " has a negative or non-finite entry");
      }
      any_positive |= v > 0.0;
      logs.push_back(v > 0.0 ? std::log(v) : kNegInf);
    }
    if (!any_positive) fail(ErrorCode::kStructural, "factor " + std::to_string(f) + " is identically zero");
    for (std::size_t v : scope) incidence_[v].push_back(f);
    max_log_.push_back(*std::max_element(logs.begin(), logs.end()));
    min_log_.push_back(*std::min_element(logs.begin(), logs.end()));
    scopes_.push_back(std::move(scope));
    log_tables_.push_back(std::move(logs));
  };
  for (std::size_t f = 0; f < factors_.size(); ++f) add_factor(f);
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (incidence_[v].empty()) {
      factors_.push_back(Factor{{variables_[v]}, {1.0, 1.0}});
      add_factor(factors_.size() - 1);
    }
  }
}

std::size_t Mrf::variable_index(EdgeId id) const {
  auto it = std::find(variables_.begin(), variables_.end(), id);
  if (it == variables_.end()) fail(ErrorCode::kVariableMismatch, "unknown MRF variable " + std::to_string(id));
  return static_cast<std::size_t>(it - variables_.begin());
}

std::optional<std::size_t> Mrf::first_zero_factor() const {
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    if (min_log_[f] == kNegInf) return f;
  }
  return std::nullopt;
}

std::size_t Mrf::table_index(std::size_t f, std::span<const std::uint8_t> states) const {
  std::size_t idx = 0;
  const auto& scope = scopes_[f];
  for (std::size_t j = 0; j < scope.size(); ++j) idx |= std::size_t{states[scope[j]]} << j;
  return idx;
}

std::size_t Mrf::table_index(std::size_t f, std::uint64_t mask) const {
  std::size_t idx = 0;
  const auto& scope = scopes_[f];
  for (std::size_t j = 0; j < scope.size(); ++j) idx |= ((mask >> scope[j]) & 1U) << j;
  return idx;
}

double Mrf::log_density(std::span<const std::uint8_t> states) const {
  double total = 0.0;
  for (std::size_t f = 0; f < factors_.size(); ++f) total += log_tables_[f][table_index(f, states)];
  return total;
}

double Mrf::log_density(std::uint64_t mask) const {
  double total = 0.0;
  for (std::size_t f = 0; f < factors_.size(); ++f) total += log_tables_[f][table_index(f, mask)];
  return total;
}

void check_scenario(const Mrf& mrf, const Scenario& scenario) {
  if (scenario.states.size() != mrf.variable_count()) {
    fail(ErrorCode::kIncompleteScenario,
         "scenario assigns " + std::to_string(scenario.states.size()) + " of " +
             std::to_string(mrf.variable_count()) + " MRF variables");
  }
  for (std::uint8_t s : scenario.states) {
    if (s > 1) fail(ErrorCode::kIncompleteScenario, "scenario state is not 0/1");
  }
}

double log_unnormalized_density(const Mrf& mrf, const Scenario& scenario) {
  check_scenario(mrf, scenario);
  return mrf.log_density(scenario.states);
}

double unnormalized_density(const Mrf& mrf, const Scenario& scenario) {
  return std::exp(log_unnormalized_density(mrf, scenario));
}

double log_partition_function(const Mrf& mrf, EnumerationOptions options) {
  const std::size_t n = mrf.variable_count();
  check_enumerable(n, options);
  detail::LogSumAccumulator acc;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) acc.add(mrf.log_density(mask));
  return acc.log_value();
}

double partition_function(const Mrf& mrf, EnumerationOptions options) {
  return std::exp(log_partition_function(mrf, options));
}

std::vector<double> exact_marginals(const Mrf& mrf, EnumerationOptions options) {
  const std::size_t n = mrf.variable_count();
  check_enumerable(n, options);
  detail::LogSumAccumulator total;
  std::vector<detail::LogSumAccumulator> ones(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const double lp = mrf.log_density(mask);
    total.add(lp);
    for (std::size_t v = 0; v < n; ++v) {
      if ((mask >> v) & 1U) ones[v].add(lp);
    }
  }
  std::vector<double> out(n);
  const double log_z = total.log_value();
  for (std::size_t v = 0; v < n; ++v) out[v] = std::exp(ones[v].log_value() - log_z);
  return out;
}

double exact_policy_value(const Mrf& mrf, const Network& network, const Policy& policy,
                          EnumerationOptions options) {
  return ExactDistribution(mrf, options).policy_value(network, policy);
}

std::vector<std::size_t> align_variables(const Mrf& mrf, const Network& network) {
  return align(mrf.variables(), network);
}

Scenario to_network_order(const Scenario& mrf_scenario, std::span<const std::size_t> mrf_to_network) {
  Scenario out;
  out.states.assign(mrf_scenario.states.size(), 0);
  for (std::size_t i = 0; i < mrf_to_network.size(); ++i) {
    out.states[mrf_to_network[i]] = mrf_scenario.states[i];
  }
  return out;
}

ExactDistribution::ExactDistribution(const Mrf& mrf, EnumerationOptions options)
    : variables_(mrf.variables()), variable_count_(mrf.variable_count()) {
  check_enumerable(variable_count_, options);
  const std::uint64_t count = std::uint64_t{1} << variable_count_;
  log_densities_.resize(count);
  detail::LogSumAccumulator acc;
  min_log_ = std::numeric_limits<double>::infinity();
  max_log_ = kNegInf;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const double lp = mrf.log_density(mask);
    log_densities_[mask] = lp;
    acc.add(lp);
    min_log_ = std::min(min_log_, lp);
    max_log_ = std::max(max_log_, lp);
  }
  log_z_ = acc.log_value();
  probabilities_.resize(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    probabilities_[mask] = std::exp(log_densities_[mask] - log_z_);
  }
}

std::vector<double> ExactDistribution::bucketed(const Network& network, const Policy& policy,
                                                std::vector<std::size_t>& mrf_to_network,
                                                std::uint64_t& protected_mask) const {
  mrf_to_network = align(variables_, network);
  const std::vector<std::uint8_t> prot = protected_variables(network, policy);
  protected_mask = 0;
  for (std::size_t i = 0; i < variable_count_; ++i) {
    if (prot[mrf_to_network[i]]) protected_mask |= std::uint64_t{1} << i;
  }
  // Reachability only depends on the effective state theta | protected, so
  // probability mass is pooled per effective state before any BFS runs.
  std::vector<double> mass(probabilities_.size(), 0.0);
  for (std::uint64_t mask = 0; mask < probabilities_.size(); ++mask) {
    mass[mask | protected_mask] += probabilities_[mask];
  }
  return mass;
}

namespace {

template <typename Fn>
void for_each_effective_state(const std::vector<double>& mass, std::uint64_t protected_mask,
                              const Network& network, const std::vector<std::size_t>& mrf_to_network,
                              Fn&& fn) {
  ReachabilityEvaluator eval(network);
  std::vector<std::uint8_t> present(network.variable_count());
  for (std::uint64_t mask = 0; mask < mass.size(); ++mask) {
    if ((mask & protected_mask) != protected_mask || mass[mask] == 0.0) continue;
    for (std::size_t i = 0; i < mrf_to_network.size(); ++i) {
      present[mrf_to_network[i]] = static_cast<std::uint8_t>((mask >> i) & 1U);
    }
    fn(mass[mask], eval(present));
  }
}

}  // namespace

double ExactDistribution::policy_value(const Network& network, const Policy& policy) const {
  std::vector<std::size_t> map;
  std::uint64_t protected_mask = 0;
  const std::vector<double> mass = bucketed(network, policy, map, protected_mask);
  detail::CompensatedSum total;
  for_each_effective_state(mass, protected_mask, network, map,
                           [&](double p, double value) { total.add(p * value); });
  return total.value();
}

double ExactDistribution::policy_variance(const Network& network, const Policy& policy) const {
  std::vector<std::size_t> map;
  std::uint64_t protected_mask = 0;
  const std::vector<double> mass = bucketed(network, policy, map, protected_mask);
  detail::CompensatedSum first;
  detail::CompensatedSum second;
  for_each_effective_state(mass, protected_mask, network, map, [&](double p, double value) {
    first.add(p * value);
    second.add(p * value * value);
  });
  return std::max(0.0, second.value() - first.value() * first.value());
}

}  // namespace corrnet
