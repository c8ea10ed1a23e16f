#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "corrnet/graph_model.hpp"
#include "corrnet/mrf.hpp"

namespace corrnet {

struct DisasterModel {
  enum class Strength { kStrong, kWeak };

  std::size_t center_count = 3;
  double radius_min = 0.1;
  double radius_max = 0.25;
  double unary_fail_prob = 0.1;
  Strength strength = Strength::kStrong;
  double lambda_strong = 8.0;
  double lambda_weak = 2.0;
  /// Coupling factors never span more variables than this.
  std::size_t scope_cap = 10;

  double lambda() const { return strength == Strength::kStrong ? lambda_strong : lambda_weak; }
  /// Throws kInvalidArgument on out-of-range parameters.
  void validate() const;
};

struct RegionAssignment {
  struct Region {
    Point center;
    double radius = 0.0;
    std::vector<EdgeId> edges;  // stochastic edges whose midpoint is inside
  };
  std::vector<Region> regions;
};

struct DisasterInstance {
  Mrf mrf;
  RegionAssignment regions;
};

/// Draws disaster centers uniformly over the bounding box of the node
/// positions, then builds the MRF for the resulting regions.
DisasterInstance generate_disaster_mrf(const Network& network, const DisasterModel& model, std::uint64_t seed);

/// One unary factor [p, 1-p] per stochastic edge, plus agreement factors
/// (lambda when all members share a state, 1 otherwise) for each non-empty
/// region. Regions above the scope cap become a chain of capped factors that
/// overlap in one variable.
Mrf build_disaster_mrf(const Network& network, const RegionAssignment& regions, const DisasterModel& model);

struct NetworkGenConfig {
  std::size_t node_count = 60;
  /// Undirected segments per node; each segment yields two directed edges.
  double edge_density = 1.25;
  /// Fraction of directed edges marked stochastic.
  double crossing_fraction = 20.0 / 150.0;
  std::size_t source_count = 2;
  int weight_min = 1;
  int weight_max = 100;
  std::size_t max_retries = 20;
};

/// Random geometric road-like digraph in the unit square: Euclidean minimum
/// spanning tree plus the shortest remaining segments, both directions, with
/// one unit-cost protection action per stochastic edge. Sources weigh 0.
Network generate_network(const NetworkGenConfig& config, std::uint64_t seed);

Network generate_network(std::size_t node_count, double edge_density, double crossing_fraction,
                         std::size_t source_count, std::uint64_t seed);

/// 60 nodes, 150 directed edges, 20 stochastic.
NetworkGenConfig small_preset();
/// 200 nodes, 500 directed edges, 81 stochastic.
NetworkGenConfig large_preset();

}  // namespace corrnet
