#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace corrnet {

using NodeId = std::int64_t;
using EdgeId = std::int64_t;
using ActionId = std::int64_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Node {
  NodeId id = 0;
  double weight = 0.0;
  std::optional<Point> position;
};

struct Edge {
  EdgeId id = 0;
  NodeId tail = 0;
  NodeId head = 0;
  bool stochastic = false;
};

/// Forces every edge in `edge_set` to be present, at price `cost`.
struct ProtectionAction {
  ActionId id = 0;
  std::vector<EdgeId> edge_set;
  double cost = 0.0;
};

/// Directed graph with node weights, a stochastic edge subset, sources, and
/// the catalogue of protection actions. Immutable once constructed.
///
/// Stochastic edges are numbered 0..variable_count()-1 in edge-list order;
/// that position is the variable index used by Scenario and by the MRF layer.
class Network {
 public:
  Network() = default;
  Network(std::vector<Node> nodes, std::vector<Edge> edges, std::vector<NodeId> sources,
          std::vector<ProtectionAction> actions);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<NodeId>& sources() const { return sources_; }
  const std::vector<ProtectionAction>& actions() const { return actions_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t variable_count() const { return stochastic_edges_.size(); }

  /// Stochastic edge ids, in variable order.
  const std::vector<EdgeId>& stochastic_edges() const { return stochastic_edges_; }

  std::size_t node_index(NodeId id) const;
  std::size_t edge_index(EdgeId id) const;
  std::size_t action_index(ActionId id) const;
  /// Variable position of a stochastic edge; throws for unknown or deterministic edges.
  std::size_t variable_index(EdgeId id) const;

  /// Variable positions covered by an action (by action index).
  const std::vector<std::size_t>& action_variables(std::size_t action) const {
    return action_variables_[action];
  }

  double total_weight() const { return total_weight_; }
  double total_action_cost() const;

  // Compressed adjacency, by index.
  std::span<const std::size_t> out_edges(std::size_t node) const {
    return {out_edges_.data() + out_offsets_[node], out_offsets_[node + 1] - out_offsets_[node]};
  }
  std::size_t head_index(std::size_t edge) const { return heads_[edge]; }
  /// -1 for deterministic edges.
  std::ptrdiff_t edge_variable(std::size_t edge) const { return edge_variable_[edge]; }
  const std::vector<std::size_t>& source_indices() const { return source_indices_; }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<NodeId> sources_;
  std::vector<ProtectionAction> actions_;

  std::vector<EdgeId> stochastic_edges_;
  std::unordered_map<NodeId, std::size_t> node_lookup_;
  std::unordered_map<EdgeId, std::size_t> edge_lookup_;
  std::unordered_map<ActionId, std::size_t> action_lookup_;
  std::vector<std::vector<std::size_t>> action_variables_;

  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> out_edges_;
  std::vector<std::size_t> heads_;
  std::vector<std::ptrdiff_t> edge_variable_;
  std::vector<std::size_t> source_indices_;
  double total_weight_ = 0.0;
};

/// One joint realization of the stochastic edges: states[i] is the state of
/// variable i (1 = present).
struct Scenario {
  std::vector<std::uint8_t> states;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// A set of protection action ids, kept sorted and unique.
class Policy {
 public:
  Policy() = default;
  explicit Policy(std::vector<ActionId> actions);

  const std::vector<ActionId>& actions() const { return actions_; }
  bool empty() const { return actions_.empty(); }
  bool contains(ActionId id) const;

  friend bool operator==(const Policy&, const Policy&) = default;
  friend auto operator<=>(const Policy& a, const Policy& b) { return a.actions_ <=> b.actions_; }

 private:
  std::vector<ActionId> actions_;
};

/// Throws kIncompleteScenario unless `scenario` has exactly one 0/1 state per variable.
void check_scenario(const Network& network, const Scenario& scenario);

/// Cost sums are order-dependent in floating point; budgets are compared with
/// this absolute slack so every code path agrees on feasibility.
inline constexpr double kBudgetSlack = 1e-9;
inline bool within_budget(double cost, double budget) { return cost <= budget + kBudgetSlack; }

double policy_cost(const Network& network, const Policy& policy);
bool is_feasible(const Network& network, const Policy& policy, double budget);

/// Per-variable flag: 1 when some action of the policy covers the variable.
std::vector<std::uint8_t> protected_variables(const Network& network, const Policy& policy);

/// Sum over sources of the weight of nodes reachable through edges that are
/// deterministic, present in the scenario, or protected. A source reaches itself.
double reachable_weight(const Network& network, const Scenario& scenario, const Policy& policy);

/// Reusable BFS workspace for the hot loops (enumeration, SAA objective).
/// Holds scratch buffers, so use one instance per thread.
class ReachabilityEvaluator {
 public:
  explicit ReachabilityEvaluator(const Network& network);

  /// `present[i]` is the effective state of variable i (after protection).
  double operator()(std::span<const std::uint8_t> present);

  /// Same, with variable states packed into a bit mask (variable_count() <= 64).
  double evaluate_mask(std::uint64_t present);

  /// Per-source reachable weights, in source order.
  std::vector<double> per_source(std::span<const std::uint8_t> present);

 private:
  double from_source(std::size_t source, std::span<const std::uint8_t> present);

  const Network* network_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::size_t> queue_;
  std::vector<std::uint8_t> mask_buffer_;
};

}  // namespace corrnet
