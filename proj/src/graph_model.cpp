#include "corrnet/graph_model.hpp"

#include <algorithm>
#include <string>

#include "corrnet/error.hpp"

namespace corrnet {

namespace {

template <typename Map, typename Key>
std::size_t lookup(const Map& map, Key key, const char* what) {
  auto it = map.find(key);
  if (it == map.end()) {
    fail(ErrorCode::kStructural, std::string("unknown ") + what + " id " + std::to_string(key));
  }
  return it->second;
}

}  // namespace

Network::Network(std::vector<Node> nodes, std::vector<Edge> edges, std::vector<NodeId> sources,
                 std::vector<ProtectionAction> actions)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      sources_(std::move(sources)),
      actions_(std::move(actions)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i].weight >= 0.0)) {
      fail(ErrorCode::kStructural, "node " + std::to_string(nodes_[i].id) + " has negative weight");
    }
    if (!node_lookup_.emplace(nodes_[i].id, i).second) {
      fail(ErrorCode::kStructural, "duplicate node id " + std::to_string(nodes_[i].id));
    }
    total_weight_ += nodes_[i].weight;
  }

  heads_.resize(edges_.size());
  edge_variable_.assign(edges_.size(), -1);
  std::vector<std::size_t> tails(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (!edge_lookup_.emplace(edge.id, e).second) {
      fail(ErrorCode::kStructural, "duplicate edge id " + std::to_string(edge.id));
    }
    tails[e] = lookup(node_lookup_, edge.tail, "node");
    heads_[e] = lookup(node_lookup_, edge.head, "node");
    if (edge.stochastic) {
      edge_variable_[e] = static_cast<std::ptrdiff_t>(stochastic_edges_.size());
      stochastic_edges_.push_back(edge.id);
    }
  }

  out_offsets_.assign(nodes_.size() + 1, 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) ++out_offsets_[tails[e] + 1];
  for (std::size_t v = 0; v < nodes_.size(); ++v) out_offsets_[v + 1] += out_offsets_[v];
  out_edges_.resize(edges_.size());
  std::vector<std::size_t> cursor(out_offsets_.begin(), out_offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) out_edges_[cursor[tails[e]]++] = e;

  if (sources_.empty()) fail(ErrorCode::kStructural, "network has no sources");
  for (NodeId s : sources_) {
    std::size_t idx = lookup(node_lookup_, s, "source node");
    if (std::find(source_indices_.begin(), source_indices_.end(), idx) != source_indices_.end()) {
      fail(ErrorCode::kStructural, "duplicate source " + std::to_string(s));
    }
    source_indices_.push_back(idx);
  }

  action_variables_.reserve(actions_.size());
  for (std::size_t a = 0; a < actions_.size(); ++a) {
    const ProtectionAction& action = actions_[a];
    if (!action_lookup_.emplace(action.id, a).second) {
      fail(ErrorCode::kStructural, "duplicate action id " + std::to_string(action.id));
    }
    if (!(action.cost >= 0.0)) {
      fail(ErrorCode::kStructural, "action " + std::to_string(action.id) + " has negative cost");
    }
    if (action.edge_set.empty()) {
      fail(ErrorCode::kStructural, "action " + std::to_string(action.id) + " protects no edges");
    }
    std::vector<std::size_t> vars;
    for (EdgeId e : action.edge_set) vars.push_back(variable_index(e));
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    action_variables_.push_back(std::move(vars));
  }
}

std::size_t Network::node_index(NodeId id) const { return lookup(node_lookup_, id, "node"); }
std::size_t Network::edge_index(EdgeId id) const { return lookup(edge_lookup_, id, "edge"); }
std::size_t Network::action_index(ActionId id) const { return lookup(action_lookup_, id, "action"); }

std::size_t Network::variable_index(EdgeId id) const {
  std::ptrdiff_t v = edge_variable_[edge_index(id)];
  if (v < 0) {
    fail(ErrorCode::kStructural, "edge " + std::to_string(id) + " is not stochastic");
  }
  return static_cast<std::size_t>(v);
}

double Network::total_action_cost() const {
  double total = 0.0;
  for (const auto& a : actions_) total += a.cost;
  return total;
}

Policy::Policy(std::vector<ActionId> actions) : actions_(std::move(actions)) {
  std::sort(actions_.begin(), actions_.end());
  actions_.erase(std::unique(actions_.begin(), actions_.end()), actions_.end());
}

bool Policy::contains(ActionId id) const {
  return std::binary_search(actions_.begin(), actions_.end(), id);
}

void check_scenario(const Network& network, const Scenario& scenario) {
  if (scenario.states.size() != network.variable_count()) {
    fail(ErrorCode::kIncompleteScenario,
         "scenario assigns " + std::to_string(scenario.states.size()) + " of " +
             std::to_string(network.variable_count()) + " stochastic edges");
  }
  for (std::uint8_t s : scenario.states) {
    if (s > 1) fail(ErrorCode::kIncompleteScenario, "scenario state is not 0/1");
  }
}

double policy_cost(const Network& network, const Policy& policy) {
  double cost = 0.0;
  for (ActionId id : policy.actions()) cost += network.actions()[network.action_index(id)].cost;
  return cost;
}

bool is_feasible(const Network& network, const Policy& policy, double budget) {
  return within_budget(policy_cost(network, policy), budget);
}

std::vector<std::uint8_t> protected_variables(const Network& network, const Policy& policy) {
  std::vector<std::uint8_t> mask(network.variable_count(), 0);
  for (ActionId id : policy.actions()) {
    for (std::size_t v : network.action_variables(network.action_index(id))) mask[v] = 1;
  }
  return mask;
}

double reachable_weight(const Network& network, const Scenario& scenario, const Policy& policy) {
  check_scenario(network, scenario);
  std::vector<std::uint8_t> present = protected_variables(network, policy);
  for (std::size_t i = 0; i < present.size(); ++i) present[i] |= scenario.states[i];
  ReachabilityEvaluator eval(network);
  return eval(present);
}

ReachabilityEvaluator::ReachabilityEvaluator(const Network& network)
    : network_(&network), stamp_(network.node_count(), 0), mask_buffer_(network.variable_count()) {
  queue_.reserve(network.node_count());
}

double ReachabilityEvaluator::from_source(std::size_t source, std::span<const std::uint8_t> present) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  queue_.clear();
  queue_.push_back(source);
  stamp_[source] = epoch_;
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    for (std::size_t e : network_->out_edges(queue_[head])) {
      std::ptrdiff_t var = network_->edge_variable(e);
      if (var >= 0 && !present[static_cast<std::size_t>(var)]) continue;
      std::size_t next = network_->head_index(e);
      if (stamp_[next] != epoch_) {
        stamp_[next] = epoch_;
        queue_.push_back(next);
      }
    }
  }
  // Sum in node order so equal reachable sets give bit-identical totals.
  const auto& nodes = network_->nodes();
  double total = 0.0;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (stamp_[v] == epoch_) total += nodes[v].weight;
  }
  return total;
}

double ReachabilityEvaluator::operator()(std::span<const std::uint8_t> present) {
  double total = 0.0;
  for (std::size_t s : network_->source_indices()) total += from_source(s, present);
  return total;
}

double ReachabilityEvaluator::evaluate_mask(std::uint64_t present) {
  for (std::size_t i = 0; i < mask_buffer_.size(); ++i) {
    mask_buffer_[i] = static_cast<std::uint8_t>((present >> i) & 1U);
  }
  return (*this)(mask_buffer_);
}

std::vector<double> ReachabilityEvaluator::per_source(std::span<const std::uint8_t> present) {
  std::vector<double> out;
  for (std::size_t s : network_->source_indices()) out.push_back(from_source(s, present));
  return out;
}

}  // namespace corrnet
