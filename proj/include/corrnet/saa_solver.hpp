#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corrnet/graph_model.hpp"

namespace corrnet {

/// The deterministic sample-average problem: maximize the mean reachable
/// weight over a fixed scenario list subject to the budget. Scenarios are in
/// network variable order.
struct SaaInstance {
  Network network;
  std::vector<Scenario> scenarios;
  double budget = 0.0;
};

/// Throws unless the instance has N >= 1 complete scenarios and budget >= 0.
void validate(const SaaInstance& instance);

struct SolveResult {
  Policy policy;
  double objective = 0.0;
  double upper_bound = 0.0;
  std::uint64_t nodes_explored = 0;
  bool proven_optimal = false;
};

struct SolverOptions {
  /// solve_exact refuses larger action sets.
  std::size_t exact_cap = 30;
  /// Absolute tolerance used when comparing objective values.
  double tolerance = 1e-9;
};

/// (1/N) * sum over scenarios of reachable_weight. Throws kInfeasiblePolicy
/// when the policy exceeds the instance budget.
double saa_objective(const SaaInstance& instance, const Policy& policy);

/// Branch-and-bound over action inclusion; proven optimal. Among optimal
/// policies returns the one whose sorted action-id list is lexicographically
/// smallest. An empty `actions` span means every action of the network.
SolveResult solve_exact(const SaaInstance& instance, std::span<const ActionId> actions = {},
                        const SolverOptions& options = {});

/// Lazy greedy on marginal gain per unit cost. Feasible, not proven optimal;
/// upper_bound is the value of protecting every individually affordable action.
SolveResult solve_greedy(const SaaInstance& instance, std::span<const ActionId> actions = {},
                         const SolverOptions& options = {});

/// Mixed-integer program for the sample-average problem with one flow
/// commodity per (sample, source). Variable naming:
///   y_<a>        binary, a = position in the action list
///   x_<i>_<s>_<e> flow of sample i, source position s, on edge position e
///   z_<i>_<s>_<v> reachability of node position v
struct MipEncoding {
  enum class VarType { kContinuous, kBinary };
  enum class Sense { kLessEqual, kEqual };

  struct Variable {
    std::string name;
    VarType type = VarType::kContinuous;
    double lower = 0.0;
    double upper = 1.0;
  };
  struct Term {
    std::size_t var = 0;
    double coef = 0.0;
  };
  struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::kLessEqual;
    double rhs = 0.0;
  };

  std::vector<Variable> variables;
  std::vector<Term> objective;  // maximized
  std::vector<Constraint> constraints;
  std::vector<ActionId> action_ids;  // y_a encodes action_ids[a]

  std::size_t y_count = 0;
  std::size_t x_count = 0;
  std::size_t z_count = 0;
  std::size_t flow_rows = 0;
  std::size_t capacity_rows = 0;
  std::size_t budget_rows = 0;
};

/// Closed-form sizes of the encoding, for checks against build_mip.
struct MipShape {
  std::size_t y = 0, x = 0, z = 0;
  std::size_t flow_rows = 0, capacity_rows = 0, flow_bounds = 0, budget_rows = 0;
};
MipShape expected_mip_shape(std::size_t samples, std::size_t sources, std::size_t nodes,
                            std::size_t edges, std::size_t stochastic_edges, std::size_t actions);

MipEncoding build_mip(const SaaInstance& instance, std::span<const ActionId> actions = {});

/// CPLEX LP text of build_mip. The layout (section order, names, number
/// formatting, line wrapping) is stable; see docs/lp_format.md.
std::string to_lp(const MipEncoding& mip);

inline std::string export_mip_lp(const SaaInstance& instance, std::span<const ActionId> actions = {}) {
  return to_lp(build_mip(instance, actions));
}

}  // namespace corrnet
