#include "corrnet/saa_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>

#include "corrnet/error.hpp"

namespace corrnet {

void validate(const SaaInstance& instance) {
  if (instance.scenarios.empty()) fail(ErrorCode::kInvalidArgument, "SAA instance needs at least one scenario");
  if (!(instance.budget >= 0.0)) fail(ErrorCode::kInvalidArgument, "budget must be non-negative");
  for (const Scenario& s : instance.scenarios) check_scenario(instance.network, s);
}

namespace {

// Objective evaluator over a fixed action list, addressed by position.
class SaaEvaluator {
 public:
  SaaEvaluator(const SaaInstance& instance, std::vector<ActionId> actions)
      : instance_(instance),
        actions_(std::move(actions)),
        eval_(instance.network),
        present_(instance.network.variable_count()) {
    for (ActionId id : actions_) {
      const std::size_t idx = instance.network.action_index(id);
      costs_.push_back(instance.network.actions()[idx].cost);
      covers_.push_back(instance.network.action_variables(idx));
    }
  }

  std::size_t size() const { return actions_.size(); }
  ActionId id(std::size_t a) const { return actions_[a]; }
  double cost(std::size_t a) const { return costs_[a]; }

  /// Mean reachable weight with the listed action positions protected.
  double operator()(const std::vector<std::size_t>& selected) {
    ++evaluations_;
    prot_.assign(instance_.network.variable_count(), 0);
    for (std::size_t a : selected) {
      for (std::size_t v : covers_[a]) prot_[v] = 1;
    }
    double total = 0.0;
    for (const Scenario& s : instance_.scenarios) {
      for (std::size_t v = 0; v < present_.size(); ++v) present_[v] = s.states[v] | prot_[v];
      total += eval_(present_);
    }
    return total / static_cast<double>(instance_.scenarios.size());
  }

  Policy policy(const std::vector<std::size_t>& selected) const {
    std::vector<ActionId> ids;
    for (std::size_t a : selected) ids.push_back(actions_[a]);
    return Policy(std::move(ids));
  }

  std::uint64_t evaluations() const { return evaluations_; }

 private:
  const SaaInstance& instance_;
  std::vector<ActionId> actions_;
  std::vector<double> costs_;
  std::vector<std::vector<std::size_t>> covers_;
  ReachabilityEvaluator eval_;
  std::vector<std::uint8_t> present_;
  std::vector<std::uint8_t> prot_;
  std::uint64_t evaluations_ = 0;
};

std::vector<ActionId> resolve_actions(const SaaInstance& instance, std::span<const ActionId> actions) {
  std::vector<ActionId> ids;
  if (actions.empty()) {
    for (const auto& a : instance.network.actions()) ids.push_back(a.id);
  } else {
    ids.assign(actions.begin(), actions.end());
  }
  for (ActionId id : ids) instance.network.action_index(id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    fail(ErrorCode::kInvalidArgument, "action set lists an action twice");
  }
  return ids;
}

double sum_costs(const SaaEvaluator& eval, const std::vector<std::size_t>& selected) {
  double c = 0.0;
  for (std::size_t a : selected) c += eval.cost(a);
  return c;
}

// Depth-first branch and bound. Bound at a node: protect the chosen actions
// plus every undecided action that alone fits the remaining budget; valid
// because the objective is monotone in the protected set.
class BranchAndBound {
 public:
  BranchAndBound(SaaEvaluator& eval, double budget, double tol) : eval_(eval), budget_(budget), tol_(tol) {
    const std::size_t m = eval.size();
    const double base = eval_({});
    std::vector<double> ratio(m);
    for (std::size_t a = 0; a < m; ++a) {
      const double gain = eval_({a}) - base;
      ratio[a] = eval.cost(a) > 0.0 ? gain / eval.cost(a)
                                    : (gain > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    order_.resize(m);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return ratio[a] > ratio[b]; });
  }

  /// Best value over feasible subsets of the allowed actions that contain `forced`.
  double maximize(const std::vector<std::size_t>& forced, const std::vector<std::uint8_t>& allowed) {
    target_.reset();
    chosen_ = forced;
    best_ = eval_(chosen_);
    dfs(0, sum_costs(eval_, chosen_), allowed);
    return best_;
  }

  /// True when some feasible extension of `forced` by allowed actions reaches `target`.
  bool reaches(const std::vector<std::size_t>& forced, const std::vector<std::uint8_t>& allowed, double target) {
    target_ = target;
    found_ = false;
    chosen_ = forced;
    best_ = eval_(chosen_);
    if (best_ >= target - tol_) return true;
    dfs(0, sum_costs(eval_, chosen_), allowed);
    return found_;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  bool done() const { return target_ && found_; }

  void offer(double value) {
    if (value > best_) best_ = value;
    if (target_ && value >= *target_ - tol_) found_ = true;
  }

  // Prune unless the subtree can beat the incumbent (maximize) or reach the target.
  bool hopeless(double bound) const {
    if (target_) return bound < *target_ - tol_;
    return bound <= best_ + tol_;
  }

  void dfs(std::size_t pos, double cost, const std::vector<std::uint8_t>& allowed) {
    ++nodes_;
    std::vector<std::size_t> fit;
    double fit_cost = 0.0;
    for (std::size_t i = pos; i < order_.size(); ++i) {
      const std::size_t a = order_[i];
      if (allowed[a] && within_budget(cost + eval_.cost(a), budget_)) {
        fit.push_back(a);
        fit_cost += eval_.cost(a);
      }
    }
    if (fit.empty()) return;
    std::vector<std::size_t> optimistic = chosen_;
    optimistic.insert(optimistic.end(), fit.begin(), fit.end());
    const double bound = eval_(optimistic);
    if (hopeless(bound)) return;
    if (within_budget(cost + fit_cost, budget_)) {
      // Everything left fits at once: the bound is attained.
      offer(bound);
      return;
    }
    std::size_t next = pos;
    while (!(allowed[order_[next]] && within_budget(cost + eval_.cost(order_[next]), budget_))) ++next;
    const std::size_t a = order_[next];

    chosen_.push_back(a);
    offer(eval_(chosen_));
    if (!done()) dfs(next + 1, cost + eval_.cost(a), allowed);
    chosen_.pop_back();
    if (!done()) dfs(next + 1, cost, allowed);
  }

  SaaEvaluator& eval_;
  double budget_;
  double tol_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> chosen_;
  double best_ = 0.0;
  std::optional<double> target_;
  bool found_ = false;
  std::uint64_t nodes_ = 0;
};

}  // namespace

double saa_objective(const SaaInstance& instance, const Policy& policy) {
  validate(instance);
  if (!is_feasible(instance.network, policy, instance.budget)) {
    fail(ErrorCode::kInfeasiblePolicy, "policy cost exceeds the budget");
  }
  ReachabilityEvaluator eval(instance.network);
  const std::vector<std::uint8_t> prot = protected_variables(instance.network, policy);
  std::vector<std::uint8_t> present(prot.size());
  double total = 0.0;
  for (const Scenario& s : instance.scenarios) {
    for (std::size_t v = 0; v < present.size(); ++v) present[v] = s.states[v] | prot[v];
    total += eval(present);
  }
  return total / static_cast<double>(instance.scenarios.size());
}

SolveResult solve_exact(const SaaInstance& instance, std::span<const ActionId> actions,
                        const SolverOptions& options) {
  validate(instance);
  std::vector<ActionId> ids = resolve_actions(instance, actions);
  if (ids.size() > options.exact_cap) {
    fail(ErrorCode::kSolverCapExceeded,
         std::to_string(ids.size()) + " actions exceed the exact-solve cap of " +
             std::to_string(options.exact_cap) + "; use solve_greedy or export the MIP");
  }
  SaaEvaluator eval(instance, ids);
  BranchAndBound bnb(eval, instance.budget, options.tolerance);
  const std::size_t m = eval.size();

  const double optimum = bnb.maximize({}, std::vector<std::uint8_t>(m, 1));

  // Positions follow ascending id order, so building the answer one smallest
  // feasible id at a time yields the lexicographically smallest optimal list.
  std::vector<std::size_t> prefix;
  double prefix_cost = 0.0;
  while (eval(prefix) < optimum - options.tolerance) {
    const std::size_t start = prefix.empty() ? 0 : prefix.back() + 1;
    bool extended = false;
    for (std::size_t a = start; a < m && !extended; ++a) {
      if (!within_budget(prefix_cost + eval.cost(a), instance.budget)) continue;
      std::vector<std::size_t> forced = prefix;
      forced.push_back(a);
      std::vector<std::uint8_t> allowed(m, 0);
      for (std::size_t b = a + 1; b < m; ++b) allowed[b] = 1;
      if (bnb.reaches(forced, allowed, optimum)) {
        prefix = std::move(forced);
        prefix_cost += eval.cost(a);
        extended = true;
      }
    }
    if (!extended) fail(ErrorCode::kInvalidArgument, "internal: optimal policy could not be reconstructed");
  }

  SolveResult result;
  result.policy = eval.policy(prefix);
  result.objective = eval(prefix);
  result.upper_bound = std::max(result.objective, optimum);
  result.nodes_explored = bnb.nodes();
  result.proven_optimal = true;
  return result;
}

SolveResult solve_greedy(const SaaInstance& instance, std::span<const ActionId> actions,
                         const SolverOptions& options) {
  validate(instance);
  std::vector<ActionId> ids = resolve_actions(instance, actions);
  SaaEvaluator eval(instance, ids);
  const std::size_t m = eval.size();
  const double tol = options.tolerance;

  auto priority = [&](std::size_t a, double gain) {
    if (eval.cost(a) > 0.0) return gain / eval.cost(a);
    return gain > tol ? std::numeric_limits<double>::infinity() : 0.0;
  };
  struct Entry {
    double priority;
    double gain;
    std::size_t action;
    std::size_t round;
  };
  auto worse = [](const Entry& x, const Entry& y) {
    if (x.priority != y.priority) return x.priority < y.priority;
    return x.action > y.action;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);

  std::vector<std::size_t> selected;
  std::vector<std::uint8_t> taken(m, 0);
  double cost = 0.0;
  double current = eval(selected);
  std::size_t round = 0;
  std::uint64_t nodes = 0;

  auto gain_of = [&](std::size_t a) {
    selected.push_back(a);
    const double g = eval(selected) - current;
    selected.pop_back();
    ++nodes;
    return g;
  };
  auto refill = [&] {
    queue = decltype(queue)(worse);
    for (std::size_t a = 0; a < m; ++a) {
      if (taken[a] || !within_budget(cost + eval.cost(a), instance.budget)) continue;
      const double g = gain_of(a);
      queue.push(Entry{priority(a, g), g, a, round});
    }
  };

  refill();
  bool rescanned = true;
  while (true) {
    while (!queue.empty()) {
      Entry top = queue.top();
      queue.pop();
      if (!within_budget(cost + eval.cost(top.action), instance.budget)) continue;
      if (top.round != round) {
        const double g = gain_of(top.action);
        queue.push(Entry{priority(top.action, g), g, top.action, round});
        continue;
      }
      if (top.gain <= tol) {
        queue = decltype(queue)(worse);
        break;
      }
      selected.push_back(top.action);
      taken[top.action] = 1;
      cost += eval.cost(top.action);
      current = eval(selected);
      ++round;
      rescanned = false;
    }
    // Lazy gains are only upper bounds for submodular objectives; confirm with
    // a full pass that no affordable action still improves before stopping.
    if (rescanned) break;
    refill();
    rescanned = true;
  }

  std::vector<std::size_t> affordable;
  for (std::size_t a = 0; a < m; ++a) {
    if (within_budget(eval.cost(a), instance.budget)) affordable.push_back(a);
  }

  SolveResult result;
  result.policy = eval.policy(selected);
  result.objective = current;
  result.upper_bound = std::max(current, eval(affordable));
  result.nodes_explored = nodes;
  result.proven_optimal = false;
  return result;
}

// ---------------------------------------------------------------------------
// MIP encoding
// ---------------------------------------------------------------------------

MipShape expected_mip_shape(std::size_t samples, std::size_t sources, std::size_t nodes,
                            std::size_t edges, std::size_t stochastic_edges, std::size_t actions) {
  MipShape s;
  s.y = actions;
  s.x = samples * sources * edges;
  s.z = samples * sources * nodes;
  s.flow_rows = samples * sources * nodes;
  s.capacity_rows = samples * sources * stochastic_edges;
  s.flow_bounds = s.x;
  s.budget_rows = 1;
  return s;
}

MipEncoding build_mip(const SaaInstance& instance, std::span<const ActionId> actions) {
  validate(instance);
  const Network& net = instance.network;
  const std::vector<ActionId> ids = resolve_actions(instance, actions);
  const std::size_t n_samples = instance.scenarios.size();
  const std::size_t n_sources = net.source_indices().size();
  const std::size_t n_nodes = net.node_count();
  const std::size_t n_edges = net.edge_count();
  const double cap = static_cast<double>(n_nodes) - 1.0;
  const double inv_n = 1.0 / static_cast<double>(n_samples);

  MipEncoding mip;
  mip.action_ids = ids;

  std::vector<std::vector<std::size_t>> covering(net.variable_count());
  for (std::size_t a = 0; a < ids.size(); ++a) {
    mip.variables.push_back({"y_" + std::to_string(a), MipEncoding::VarType::kBinary, 0.0, 1.0});
    for (std::size_t v : net.action_variables(net.action_index(ids[a]))) covering[v].push_back(a);
  }
  mip.y_count = ids.size();

  auto key = [](std::size_t i, std::size_t s, std::size_t j) {
    return std::to_string(i) + "_" + std::to_string(s) + "_" + std::to_string(j);
  };
  const std::size_t x_base = mip.variables.size();
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t s = 0; s < n_sources; ++s) {
      for (std::size_t e = 0; e < n_edges; ++e) {
        mip.variables.push_back({"x_" + key(i, s, e), MipEncoding::VarType::kContinuous, 0.0, cap});
      }
    }
  }
  mip.x_count = mip.variables.size() - x_base;
  const std::size_t z_base = mip.variables.size();
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t s = 0; s < n_sources; ++s) {
      for (std::size_t v = 0; v < n_nodes; ++v) {
        mip.variables.push_back({"z_" + key(i, s, v), MipEncoding::VarType::kContinuous, 0.0, 1.0});
      }
    }
  }
  mip.z_count = mip.variables.size() - z_base;
  auto x_var = [&](std::size_t i, std::size_t s, std::size_t e) { return x_base + (i * n_sources + s) * n_edges + e; };
  auto z_var = [&](std::size_t i, std::size_t s, std::size_t v) { return z_base + (i * n_sources + s) * n_nodes + v; };

  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t s = 0; s < n_sources; ++s) {
      for (std::size_t v = 0; v < n_nodes; ++v) {
        const double w = net.nodes()[v].weight;
        if (w != 0.0) mip.objective.push_back({z_var(i, s, v), w * inv_n});
      }
    }
  }

  // Flow conservation: outflow - inflow = sum_{k != s} z_k at the source and
  // -z_r elsewhere, so every reachable node absorbs one unit.
  std::vector<std::vector<std::size_t>> in_edges(n_nodes);
  for (std::size_t e = 0; e < n_edges; ++e) in_edges[net.head_index(e)].push_back(e);
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t s = 0; s < n_sources; ++s) {
      const std::size_t src = net.source_indices()[s];
      for (std::size_t r = 0; r < n_nodes; ++r) {
        MipEncoding::Constraint row;
        row.name = "flow_" + key(i, s, r);
        row.sense = MipEncoding::Sense::kEqual;
        for (std::size_t e : net.out_edges(r)) row.terms.push_back({x_var(i, s, e), 1.0});
        for (std::size_t e : in_edges[r]) row.terms.push_back({x_var(i, s, e), -1.0});
        if (r == src) {
          for (std::size_t k = 0; k < n_nodes; ++k) {
            if (k != src) row.terms.push_back({z_var(i, s, k), -1.0});
          }
          if (row.terms.empty()) row.terms.push_back({z_var(i, s, src), 0.0});
        } else {
          row.terms.push_back({z_var(i, s, r), 1.0});
        }
        mip.constraints.push_back(std::move(row));
        ++mip.flow_rows;
      }
    }
  }

  // Capacity: x_e <= (|V| - 1) * (sum of covering y + theta_e), stochastic edges only.
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t s = 0; s < n_sources; ++s) {
      for (std::size_t e = 0; e < n_edges; ++e) {
        const std::ptrdiff_t var = net.edge_variable(e);
        if (var < 0) continue;
        MipEncoding::Constraint row;
        row.name = "cap_" + key(i, s, e);
        row.sense = MipEncoding::Sense::kLessEqual;
        row.terms.push_back({x_var(i, s, e), 1.0});
        for (std::size_t a : covering[static_cast<std::size_t>(var)]) row.terms.push_back({a, -cap});
        row.rhs = cap * instance.scenarios[i].states[static_cast<std::size_t>(var)];
        mip.constraints.push_back(std::move(row));
        ++mip.capacity_rows;
      }
    }
  }

  MipEncoding::Constraint budget;
  budget.name = "budget";
  budget.sense = MipEncoding::Sense::kLessEqual;
  budget.rhs = instance.budget;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    budget.terms.push_back({a, net.actions()[net.action_index(ids[a])].cost});
  }
  if (budget.terms.empty() && !mip.variables.empty()) budget.terms.push_back({0, 0.0});
  mip.constraints.push_back(std::move(budget));
  mip.budget_rows = 1;
  return mip;
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Terms, at most kTermsPerLine per line; continuation lines are indented.
void write_terms(std::string& out, const MipEncoding& mip, const std::vector<MipEncoding::Term>& terms) {
  constexpr std::size_t kTermsPerLine = 8;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (t > 0 && t % kTermsPerLine == 0) out += "\n   ";
    const double c = terms[t].coef;
    out += c < 0 ? " - " : " + ";
    out += number(std::abs(c));
    out += ' ';
    out += mip.variables[terms[t].var].name;
  }
}

}  // namespace

std::string to_lp(const MipEncoding& mip) {
  std::string out;
  out += "\\ corrnet sample-average network design MIP\n";
  for (std::size_t a = 0; a < mip.action_ids.size(); ++a) {
    out += "\\ y_" + std::to_string(a) + " = action " + std::to_string(mip.action_ids[a]) + "\n";
  }
  out += "Maximize\n obj:";
  if (mip.objective.empty()) {
    out += " 0 " + mip.variables.front().name;
  } else {
    write_terms(out, mip, mip.objective);
  }
  out += "\nSubject To\n";
  for (const auto& row : mip.constraints) {
    out += ' ' + row.name + ':';
    write_terms(out, mip, row.terms);
    out += row.sense == MipEncoding::Sense::kEqual ? " = " : " <= ";
    out += number(row.rhs);
    out += '\n';
  }
  out += "Bounds\n";
  for (const auto& var : mip.variables) {
    if (var.type == MipEncoding::VarType::kBinary) continue;
    out += ' ' + number(var.lower) + " <= " + var.name + " <= " + number(var.upper) + '\n';
  }
  out += "Binary\n";
  for (const auto& var : mip.variables) {
    if (var.type == MipEncoding::VarType::kBinary) out += ' ' + var.name + '\n';
  }
  out += "End\n";
  return out;
}

}  // namespace corrnet
