#include "corrnet/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "corrnet/error.hpp"
#include "corrnet/rng.hpp"

namespace corrnet {

void DisasterModel::validate() const {
  if (!(unary_fail_prob > 0.0 && unary_fail_prob < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "unary failure probability must lie in (0, 1)");
  }
  if (!(radius_min >= 0.0 && radius_min <= radius_max)) {
    fail(ErrorCode::kInvalidArgument, "radius range must satisfy 0 <= min <= max");
  }
  if (!(lambda_strong > lambda_weak && lambda_weak >= 1.0) || !std::isfinite(lambda_strong)) {
    fail(ErrorCode::kInvalidArgument, "coupling strengths must satisfy lambda_strong > lambda_weak >= 1");
  }
  if (scope_cap < 2 || scope_cap > 20) fail(ErrorCode::kInvalidArgument, "scope cap must lie in [2, 20]");
}

namespace {

Point midpoint(const Network& network, const Edge& e) {
  const Node& a = network.nodes()[network.node_index(e.tail)];
  const Node& b = network.nodes()[network.node_index(e.head)];
  if (!a.position || !b.position) {
    fail(ErrorCode::kStructural, "edge " + std::to_string(e.id) + " has an endpoint without coordinates");
  }
  return {(a.position->x + b.position->x) / 2.0, (a.position->y + b.position->y) / 2.0};
}

Factor agreement_factor(std::vector<EdgeId> scope, double lambda) {
  std::vector<double> table(std::size_t{1} << scope.size(), 1.0);
  table.front() = lambda;
  table.back() = lambda;
  return Factor{std::move(scope), std::move(table)};
}

}  // namespace

Mrf build_disaster_mrf(const Network& network, const RegionAssignment& regions, const DisasterModel& model) {
  model.validate();
  const auto& vars = network.stochastic_edges();
  if (vars.empty()) fail(ErrorCode::kStructural, "network has no stochastic edges");

  std::vector<Factor> factors;
  const double p = model.unary_fail_prob;
  for (EdgeId e : vars) factors.push_back(Factor{{e}, {p, 1.0 - p}});

  const double lambda = model.lambda();
  const std::size_t cap = model.scope_cap;
  for (const auto& region : regions.regions) {
    const auto& members = region.edges;
    if (members.empty()) continue;
    if (members.size() <= cap) {
      factors.push_back(agreement_factor(members, lambda));
      continue;
    }
    for (std::size_t start = 0; start + 1 < members.size(); start += cap - 1) {
      std::size_t end = std::min(start + cap, members.size());
      factors.push_back(agreement_factor({members.begin() + static_cast<std::ptrdiff_t>(start),
                                          members.begin() + static_cast<std::ptrdiff_t>(end)},
                                         lambda));
      if (end == members.size()) break;
    }
  }
  return Mrf(vars, std::move(factors));
}

DisasterInstance generate_disaster_mrf(const Network& network, const DisasterModel& model, std::uint64_t seed) {
  model.validate();
  const auto& vars = network.stochastic_edges();
  if (vars.empty()) fail(ErrorCode::kStructural, "network has no stochastic edges");

  std::vector<Point> mids;
  for (EdgeId e : vars) mids.push_back(midpoint(network, network.edges()[network.edge_index(e)]));

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const Node& n : network.nodes()) {
    if (!n.position) fail(ErrorCode::kStructural, "node " + std::to_string(n.id) + " has no coordinates");
    x_lo = std::min(x_lo, n.position->x);
    x_hi = std::max(x_hi, n.position->x);
    y_lo = std::min(y_lo, n.position->y);
    y_hi = std::max(y_hi, n.position->y);
  }

  Rng rng(seed);
  RegionAssignment regions;
  for (std::size_t c = 0; c < model.center_count; ++c) {
    RegionAssignment::Region region;
    region.center = {rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
    region.radius = rng.uniform(model.radius_min, model.radius_max);
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (std::hypot(mids[v].x - region.center.x, mids[v].y - region.center.y) <= region.radius) {
        region.edges.push_back(vars[v]);
      }
    }
    regions.regions.push_back(std::move(region));
  }
  Mrf mrf = build_disaster_mrf(network, regions, model);
  return {std::move(mrf), std::move(regions)};
}

namespace {

struct Segment {
  std::size_t a, b;
  double length;
};

// Prim on the complete Euclidean graph.
std::vector<Segment> spanning_tree(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  std::vector<Segment> tree;
  if (n < 2) return tree;
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, 0);
  std::vector<bool> in_tree(n, false);
  best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!in_tree[v] && (u == n || best[v] < best[u])) u = v;
    }
    in_tree[u] = true;
    if (step > 0) tree.push_back({std::min(parent[u], u), std::max(parent[u], u), best[u]});
    for (std::size_t v = 0; v < n; ++v) {
      double d = std::hypot(pts[u].x - pts[v].x, pts[u].y - pts[v].y);
      if (!in_tree[v] && d < best[v]) {
        best[v] = d;
        parent[v] = u;
      }
    }
  }
  return tree;
}

bool all_reachable(const Network& network) {
  std::vector<std::uint8_t> seen(network.node_count(), 0);
  std::vector<std::size_t> queue(network.source_indices().begin(), network.source_indices().end());
  for (std::size_t s : queue) seen[s] = 1;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    for (std::size_t e : network.out_edges(queue[h])) {
      std::size_t v = network.head_index(e);
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return queue.size() == network.node_count();
}

Network attempt(const NetworkGenConfig& config, Rng& rng) {
  const std::size_t n = config.node_count;
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = rng.uniform();
    p.y = rng.uniform();
  }

  const std::size_t max_segments = n * (n - 1) / 2;
  const auto wanted = static_cast<std::size_t>(std::llround(config.edge_density * static_cast<double>(n)));
  const std::size_t target = std::min(max_segments, std::max(wanted, n - 1));

  std::vector<Segment> segments = spanning_tree(pts);
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (const auto& s : segments) used[s.a][s.b] = true;
  if (segments.size() < target) {
    std::vector<Segment> rest;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!used[a][b]) rest.push_back({a, b, std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y)});
      }
    }
    std::stable_sort(rest.begin(), rest.end(), [](const Segment& l, const Segment& r) { return l.length < r.length; });
    for (std::size_t i = 0; segments.size() < target; ++i) segments.push_back(rest[i]);
  }

  std::vector<Edge> edges;
  for (const auto& s : segments) {
    edges.push_back({static_cast<EdgeId>(edges.size()), static_cast<NodeId>(s.a), static_cast<NodeId>(s.b), false});
    edges.push_back({static_cast<EdgeId>(edges.size()), static_cast<NodeId>(s.b), static_cast<NodeId>(s.a), false});
  }
  const auto crossings = std::min<std::size_t>(
      edges.size(), static_cast<std::size_t>(std::llround(config.crossing_fraction * static_cast<double>(edges.size()))));
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < crossings; ++i) {
    std::swap(order[i], order[i + rng.below(order.size() - i)]);
    edges[order[i]].stochastic = true;
  }

  std::vector<std::size_t> node_order(n);
  std::iota(node_order.begin(), node_order.end(), 0);
  std::vector<bool> is_source(n, false);
  std::vector<NodeId> sources;
  for (std::size_t i = 0; i < config.source_count; ++i) {
    std::swap(node_order[i], node_order[i + rng.below(n - i)]);
    is_source[node_order[i]] = true;
    sources.push_back(static_cast<NodeId>(node_order[i]));
  }

  const auto span = static_cast<std::uint64_t>(config.weight_max - config.weight_min + 1);
  std::vector<Node> nodes;
  for (std::size_t v = 0; v < n; ++v) {
    double w = static_cast<double>(config.weight_min + static_cast<int>(rng.below(span)));
    nodes.push_back({static_cast<NodeId>(v), is_source[v] ? 0.0 : w, pts[v]});
  }

  std::vector<ProtectionAction> actions;
  for (const Edge& e : edges) {
    if (e.stochastic) actions.push_back({static_cast<ActionId>(actions.size()), {e.id}, 1.0});
  }
  return Network(std::move(nodes), std::move(edges), std::move(sources), std::move(actions));
}

}  // namespace

Network generate_network(const NetworkGenConfig& config, std::uint64_t seed) {
  if (config.node_count == 0) fail(ErrorCode::kInvalidArgument, "node_count must be positive");
  if (config.source_count == 0 || config.source_count > config.node_count) {
    fail(ErrorCode::kInvalidArgument, "source_count must lie in [1, node_count]");
  }
  if (!(config.edge_density >= 0.0) || !std::isfinite(config.edge_density)) {
    fail(ErrorCode::kInvalidArgument, "edge_density must be non-negative");
  }
  if (!(config.crossing_fraction >= 0.0 && config.crossing_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "crossing_fraction must lie in [0, 1]");
  }
  if (config.weight_min < 0 || config.weight_max < config.weight_min) {
    fail(ErrorCode::kInvalidArgument, "weight range must satisfy 0 <= min <= max");
  }
  for (std::size_t retry = 0; retry <= config.max_retries; ++retry) {
    Rng rng(derive_seed(seed, retry));
    Network network = attempt(config, rng);
    if (all_reachable(network)) return network;
  }
  fail(ErrorCode::kStructural, "generated networks stayed disconnected from the sources after retries");
}

Network generate_network(std::size_t node_count, double edge_density, double crossing_fraction,
                         std::size_t source_count, std::uint64_t seed) {
  NetworkGenConfig config;
  config.node_count = node_count;
  config.edge_density = edge_density;
  config.crossing_fraction = crossing_fraction;
  config.source_count = source_count;
  return generate_network(config, seed);
}

NetworkGenConfig small_preset() { return NetworkGenConfig{}; }

NetworkGenConfig large_preset() {
  NetworkGenConfig config;
  config.node_count = 200;
  config.edge_density = 1.25;
  config.crossing_fraction = 81.0 / 500.0;
  config.source_count = 4;
  return config;
}

}  // namespace corrnet
