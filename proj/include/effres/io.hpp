#pragma once

#include <string>
#include <variant>

#include "effres/power.hpp"

// Single-header nlohmann/json lives in vendor/.
#include <json.hpp>

namespace effres::io {

using json = nlohmann::ordered_json;
using power::Equilibrium;
using power::PowerNetwork;
using sgraph::SignedGraph;

/// Either of the two network schemas: `w` edges make a SignedGraph, `B`
/// edges a PowerNetwork. Node ids are strings at this boundary and become
/// dense indices inside; `labels` keeps the file order for output.
struct LoadedNetwork {
  std::variant<SignedGraph, PowerNetwork> network;
  std::vector<std::string> labels;

  bool is_power() const { return std::holds_alternative<PowerNetwork>(network); }
  const PowerNetwork& power_net() const { return std::get<PowerNetwork>(network); }
  const SignedGraph& graph() const { return std::get<SignedGraph>(network); }
};

LoadedNetwork parse_network(const json& doc);
LoadedNetwork load_network(const std::string& path);

json network_to_json(const SignedGraph& g, const std::vector<std::string>& labels);
json network_to_json(const PowerNetwork& net, const std::vector<std::string>& labels);

/// Equilibrium schema: {"reference": id, "theta_deg": {id: degrees}}.
Equilibrium parse_equilibrium(const json& doc, const std::vector<std::string>& labels);
Equilibrium load_equilibrium(const std::string& path,
                             const std::vector<std::string>& labels);
json equilibrium_to_json(const Equilibrium& eq, const std::vector<std::string>& labels);

/// Resolves a comma-separated id list against the node labels.
std::vector<int> parse_node_list(const std::string& csv,
                                 const std::vector<std::string>& labels);

/// Canonical float formatting used by reports and round trips (15
/// significant digits).
std::string format_double(double v);

/// Skeleton run report: schema version, command echo, timestamp.
json make_report(const std::string& command);

}  // namespace effres::io
