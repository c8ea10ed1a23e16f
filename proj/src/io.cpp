#include "corrnet/io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "corrnet/error.hpp"

namespace corrnet {

namespace {

template <typename T>
T field(const Json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) {
    fail(ErrorCode::kStructural, std::string("missing field \"") + name + "\"");
  }
  try {
    return obj.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kStructural, std::string("bad field \"") + name + "\": " + e.what());
  }
}

}  // namespace

Json network_to_json(const Network& network) {
  Json doc;
  Json nodes = Json::array();
  for (const Node& n : network.nodes()) {
    Json node{{"id", n.id}, {"weight", n.weight}};
    if (n.position) {
      node["x"] = n.position->x;
      node["y"] = n.position->y;
    }
    nodes.push_back(std::move(node));
  }
  Json edges = Json::array();
  for (const Edge& e : network.edges()) {
    edges.push_back({{"id", e.id}, {"tail", e.tail}, {"head", e.head}, {"stochastic", e.stochastic}});
  }
  Json actions = Json::array();
  for (const ProtectionAction& a : network.actions()) {
    actions.push_back({{"id", a.id}, {"edge_ids", a.edge_set}, {"cost", a.cost}});
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["sources"] = network.sources();
  doc["actions"] = std::move(actions);
  return doc;
}

Network network_from_json(const Json& doc) {
  std::vector<Node> nodes;
  for (const Json& n : field<Json>(doc, "nodes")) {
    Node node{field<NodeId>(n, "id"), field<double>(n, "weight"), std::nullopt};
    if (n.contains("x") || n.contains("y")) node.position = Point{field<double>(n, "x"), field<double>(n, "y")};
    nodes.push_back(node);
  }
  std::vector<Edge> edges;
  for (const Json& e : field<Json>(doc, "edges")) {
    edges.push_back(Edge{field<EdgeId>(e, "id"), field<NodeId>(e, "tail"), field<NodeId>(e, "head"),
                         e.contains("stochastic") ? field<bool>(e, "stochastic") : false});
  }
  std::vector<ProtectionAction> actions;
  if (doc.contains("actions")) {
    for (const Json& a : doc.at("actions")) {
      actions.push_back(ProtectionAction{field<ActionId>(a, "id"), field<std::vector<EdgeId>>(a, "edge_ids"),
                                         field<double>(a, "cost")});
    }
  }
  return Network(std::move(nodes), std::move(edges), field<std::vector<NodeId>>(doc, "sources"),
                 std::move(actions));
}

Json mrf_to_json(const Mrf& mrf) {
  Json factors = Json::array();
  for (const Factor& f : mrf.factors()) factors.push_back({{"scope", f.scope}, {"table", f.table}});
  Json doc;
  doc["variables"] = mrf.variables();
  doc["factors"] = std::move(factors);
  return doc;
}

Mrf mrf_from_json(const Json& doc) {
  std::vector<Factor> factors;
  for (const Json& f : field<Json>(doc, "factors")) {
    factors.push_back(Factor{field<std::vector<EdgeId>>(f, "scope"), field<std::vector<double>>(f, "table")});
  }
  return Mrf(field<std::vector<EdgeId>>(doc, "variables"), std::move(factors));
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kStructural, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kStructural, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kStructural, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

Network read_network(const std::filesystem::path& path) { return network_from_json(read_json(path)); }
Mrf read_mrf(const std::filesystem::path& path) { return mrf_from_json(read_json(path)); }

void write_scenarios(std::ostream& out, const std::vector<EdgeId>& variables,
                     const std::vector<Scenario>& scenarios, Json header) {
  header["variables"] = variables;
  header["count"] = scenarios.size();
  out << header.dump() << '\n';
  std::string line;
  for (const Scenario& s : scenarios) {
    if (s.states.size() != variables.size()) {
      fail(ErrorCode::kIncompleteScenario, "scenario width does not match the variable list");
    }
    line.assign(s.states.size(), '0');
    for (std::size_t i = 0; i < s.states.size(); ++i) {
      if (s.states[i]) line[i] = '1';
    }
    out << line << '\n';
  }
}

ScenarioFile read_scenarios(std::istream& in) {
  ScenarioFile file;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kStructural, "scenario file is empty");
  try {
    file.header = Json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kStructural, std::string("scenario header: ") + e.what());
  }
  file.variables = field<std::vector<EdgeId>>(file.header, "variables");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.size() != file.variables.size()) {
      fail(ErrorCode::kIncompleteScenario, "scenario line has " + std::to_string(line.size()) + " bits, expected " +
                                               std::to_string(file.variables.size()));
    }
    Scenario s;
    s.states.reserve(line.size());
    for (char c : line) {
      if (c != '0' && c != '1') fail(ErrorCode::kStructural, "scenario line holds a non-bit character");
      s.states.push_back(c == '1');
    }
    file.scenarios.push_back(std::move(s));
  }
  return file;
}

ScenarioFile read_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kStructural, "cannot open " + path.string());
  return read_scenarios(in);
}

std::vector<Scenario> scenarios_for(const ScenarioFile& file, const Network& network) {
  if (file.variables.size() != network.variable_count()) {
    fail(ErrorCode::kVariableMismatch, "scenario file and network disagree on the stochastic edges");
  }
  std::vector<std::size_t> map;
  for (EdgeId id : file.variables) {
    try {
      map.push_back(network.variable_index(id));
    } catch (const Error&) {
      fail(ErrorCode::kVariableMismatch, "scenario variable " + std::to_string(id) + " is not a stochastic edge");
    }
  }
  std::vector<Scenario> out;
  out.reserve(file.scenarios.size());
  for (const Scenario& s : file.scenarios) out.push_back(to_network_order(s, map));
  return out;
}

}  // namespace corrnet
