#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "corrnet/graph_model.hpp"

namespace corrnet {

/// Potential over an ordered scope of stochastic edge variables.
///
/// Table layout: entry `idx` is the potential of the assignment in which scope
/// member j takes bit j of `idx` (least significant first). A two-variable
/// agreement factor is therefore {a, d, d, a}.
struct Factor {
  std::vector<EdgeId> scope;
  std::vector<double> table;
};

/// Product-of-potentials distribution over the stochastic edge states.
///
/// Variables are identified by edge id; their position in variables() is the
/// index used by Scenario. Variables not touched by any factor get an implicit
/// uniform unary factor appended at construction.
class Mrf {
 public:
  Mrf() = default;
  Mrf(std::vector<EdgeId> variables, std::vector<Factor> factors);

  const std::vector<EdgeId>& variables() const { return variables_; }
  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t variable_count() const { return variables_.size(); }
  std::size_t factor_count() const { return factors_.size(); }

  std::size_t variable_index(EdgeId id) const;

  /// Scope of factor f as variable positions.
  const std::vector<std::size_t>& scope_indices(std::size_t f) const { return scopes_[f]; }
  /// Factors whose scope contains variable v.
  const std::vector<std::size_t>& factors_of(std::size_t v) const { return incidence_[v]; }
  /// Natural log of the table of factor f; zero entries map to -infinity.
  const std::vector<double>& log_table(std::size_t f) const { return log_tables_[f]; }

  /// Index of the first factor holding a zero entry, if any.
  std::optional<std::size_t> first_zero_factor() const;

  /// Table index of factor f under the given assignment.
  std::size_t table_index(std::size_t f, std::span<const std::uint8_t> states) const;
  std::size_t table_index(std::size_t f, std::uint64_t mask) const;

  /// Sum of log potentials; -infinity when some potential is zero.
  double log_density(std::span<const std::uint8_t> states) const;
  double log_density(std::uint64_t mask) const;

  /// Largest / smallest log entry of factor f.
  double max_log_entry(std::size_t f) const { return max_log_[f]; }
  double min_log_entry(std::size_t f) const { return min_log_[f]; }

 private:
  std::vector<EdgeId> variables_;
  std::vector<Factor> factors_;
  std::vector<std::vector<std::size_t>> scopes_;
  std::vector<std::vector<std::size_t>> incidence_;
  std::vector<std::vector<double>> log_tables_;
  std::vector<double> max_log_;
  std::vector<double> min_log_;
};

struct EnumerationOptions {
  /// Largest variable count handled by exact enumeration.
  std::size_t cap = 25;
};

void check_scenario(const Mrf& mrf, const Scenario& scenario);

double unnormalized_density(const Mrf& mrf, const Scenario& scenario);
double log_unnormalized_density(const Mrf& mrf, const Scenario& scenario);

/// Exact Z by enumerating all 2^n assignments.
double partition_function(const Mrf& mrf, EnumerationOptions options = {});
double log_partition_function(const Mrf& mrf, EnumerationOptions options = {});

/// Pr(theta_v = 1) for every variable, by enumeration.
std::vector<double> exact_marginals(const Mrf& mrf, EnumerationOptions options = {});

/// Expected reachable weight under the MRF, by enumeration.
double exact_policy_value(const Mrf& mrf, const Network& network, const Policy& policy,
                          EnumerationOptions options = {});

/// mrf_to_network[i] is the network variable position of MRF variable i.
/// Throws kVariableMismatch when the two stochastic edge sets differ.
std::vector<std::size_t> align_variables(const Mrf& mrf, const Network& network);

/// Reorders an MRF-ordered scenario into network variable order.
Scenario to_network_order(const Scenario& mrf_scenario, std::span<const std::size_t> mrf_to_network);

/// Enumerated, normalized distribution kept in memory (2^n doubles). Serves
/// repeated exact evaluations of many policies on one instance.
class ExactDistribution {
 public:
  explicit ExactDistribution(const Mrf& mrf, EnumerationOptions options = {});

  std::size_t variable_count() const { return variable_count_; }
  double log_partition() const { return log_z_; }
  double min_log_density() const { return min_log_; }
  double max_log_density() const { return max_log_; }

  /// Pr of the assignment whose bit i is the state of MRF variable i.
  double probability(std::uint64_t mask) const { return probabilities_[mask]; }
  std::span<const double> probabilities() const { return probabilities_; }
  std::span<const double> log_densities() const { return log_densities_; }

  double policy_value(const Network& network, const Policy& policy) const;
  /// Variance of reachable_weight under the distribution for a fixed policy.
  double policy_variance(const Network& network, const Policy& policy) const;

 private:
  std::vector<double> bucketed(const Network& network, const Policy& policy,
                               std::vector<std::size_t>& mrf_to_network,
                               std::uint64_t& protected_mask) const;

  std::vector<EdgeId> variables_;
  std::size_t variable_count_;
  std::vector<double> log_densities_;
  std::vector<double> probabilities_;
  double log_z_ = 0.0;
  double min_log_ = 0.0;
  double max_log_ = 0.0;
};

}  // namespace corrnet
