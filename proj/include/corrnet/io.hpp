#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "corrnet/graph_model.hpp"
#include "corrnet/mrf.hpp"
#include "json.hpp"

namespace corrnet {

using Json = nlohmann::ordered_json;

// Network document:
//   {"nodes":   [{"id", "weight", "x"?, "y"?}],
//    "edges":   [{"id", "tail", "head", "stochastic"}],
//    "sources": [node ids],
//    "actions": [{"id", "edge_ids", "cost"}]}
Json network_to_json(const Network& network);
Network network_from_json(const Json& doc);

// MRF document: {"variables": [edge ids], "factors": [{"scope": [edge ids], "table": [...]}]}.
// Table entry idx holds the potential where scope member j takes bit j of idx.
Json mrf_to_json(const Mrf& mrf);
Mrf mrf_from_json(const Json& doc);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);

Network read_network(const std::filesystem::path& path);
Mrf read_mrf(const std::filesystem::path& path);

/// Scenario file: one JSON header line naming the variable order
/// ({"variables": [...], "count": n, ...}), then one line of '0'/'1'
/// characters per scenario, in that order.
struct ScenarioFile {
  std::vector<EdgeId> variables;
  Json header;
  std::vector<Scenario> scenarios;
};

void write_scenarios(std::ostream& out, const std::vector<EdgeId>& variables,
                     const std::vector<Scenario>& scenarios, Json header = Json::object());
ScenarioFile read_scenarios(std::istream& in);
ScenarioFile read_scenarios(const std::filesystem::path& path);

/// Scenarios of `file` re-indexed into the network's variable order.
std::vector<Scenario> scenarios_for(const ScenarioFile& file, const Network& network);

}  // namespace corrnet
