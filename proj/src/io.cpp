#include "effres/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "effres/errors.hpp"

namespace effres::io {

namespace {

std::string id_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError("node id must be a string or an integer");
}

double number_field(const json& node, const char* key, double fallback,
                    bool required = false) {
  if (!node.contains(key)) {
    if (required) throw ParseError(std::string("missing field ") + key);
    return fallback;
  }
  const json& v = node.at(key);
  if (!v.is_number()) throw ParseError(std::string(key) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(std::string(key) + " must be finite");
  return x;
}

}  // namespace

NetworkFile parse_network(const json& doc) {
  if (!doc.contains("nodes") || !doc.contains("edges")) {
    throw ParseError("network file needs 'nodes' and 'edges'");
  }
  std::vector<std::string> labels;
  std::map<std::string, int> index;
  for (const json& node : doc.at("nodes")) {
    const std::string id = id_to_string(node.at("id"));
    if (index.count(id)) throw ParseError("duplicate node id " + id);
    index[id] = static_cast<int>(labels.size());
    labels.push_back(id);
  }

  bool any_w = false, any_b = false;
  for (const json& e : doc.at("edges")) {
    any_w = any_w || e.contains("w");
    any_b = any_b || e.contains("B");
  }
  if (any_w == any_b) {
    throw ParseError("edges must use exactly one of the 'w' or 'B' schemas");
  }

  auto endpoint = [&](const json& e, const char* key) {
    const std::string id = id_to_string(e.at(key));
    auto it = index.find(id);
    if (it == index.end()) throw ParseError("edge references unknown node " + id);
    return it->second;
  };

  if (any_w) {
    std::vector<sgraph::Edge> edges;
    for (const json& e : doc.at("edges")) {
      edges.push_back({endpoint(e, "from"), endpoint(e, "to"),
                       number_field(e, "w", 0.0, true)});
    }
    return SignedGraph(static_cast<int>(labels.size()), std::move(edges), labels);
  }

  std::vector<power::Bus> buses;
  for (const json& node : doc.at("nodes")) {
    power::Bus bus;
    const std::string kind = node.value("kind", "load");
    if (kind == "generator") {
      bus.kind = power::BusKind::Generator;
      bus.inertia = number_field(node, "M", 0.0, true);
    } else if (kind == "load") {
      bus.kind = power::BusKind::Load;
    } else {
      throw ParseError("bus kind must be 'generator' or 'load'");
    }
    bus.v_set = number_field(node, "V_set", 1.0);
    bus.damping = number_field(node, "D", 1.0);
    bus.power = number_field(node, "P", 0.0);
    buses.push_back(bus);
  }
  std::vector<power::Line> lines;
  for (const json& e : doc.at("edges")) {
    lines.push_back({endpoint(e, "from"), endpoint(e, "to"),
                     number_field(e, "B", 0.0, true)});
  }
  PowerNetwork net(std::move(buses), std::move(lines));
  (void)labels;  // bus labels are their 1-based positions unless ids differ
  // Keep the file's ids by storing them alongside: PowerNetwork does not
  // carry labels, so commands re-parse them via network_labels().
  return net;
}

NetworkFile load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_network(doc);
}

json network_to_json(const SignedGraph& g) {
  json doc;
  doc["nodes"] = json::array();
  for (int i = 0; i < g.node_count(); ++i) {
    json node;
    node["id"] = g.labels() ? (*g.labels())[i] : std::to_string(i + 1);
    doc["nodes"].push_back(node);
  }
  doc["edges"] = json::array();
  const auto& labels = g.labels();
  for (const sgraph::Edge& e : g.edges()) {
    json edge;
    edge["from"] = labels ? (*labels)[e.u] : std::to_string(e.u + 1);
    edge["to"] = labels ? (*labels)[e.v] : std::to_string(e.v + 1);
    edge["w"] = e.weight;
    doc["edges"].push_back(edge);
  }
  return doc;
}

json network_to_json(const PowerNetwork& net) {
  json doc;
  doc["nodes"] = json::array();
  for (int i = 0; i < net.bus_count(); ++i) {
    const power::Bus& b = net.buses()[i];
    json node;
    node["id"] = std::to_string(i + 1);
    node["kind"] = b.kind == power::BusKind::Generator ? "generator" : "load";
    node["V_set"] = b.v_set;
    if (b.kind == power::BusKind::Generator) node["M"] = b.inertia;
    node["D"] = b.damping;
    node["P"] = b.power;
    doc["nodes"].push_back(node);
  }
  doc["edges"] = json::array();
  for (const power::Line& l : net.lines()) {
    json edge;
    edge["from"] = std::to_string(l.from + 1);
    edge["to"] = std::to_string(l.to + 1);
    edge["B"] = l.b;
    doc["edges"].push_back(edge);
  }
  return doc;
}

std::vector<std::string> network_labels(const NetworkFile& file) {
  if (const SignedGraph* g = std::get_if<SignedGraph>(&file)) {
    if (g->labels()) return *g->labels();
    std::vector<std::string> out;
    for (int i = 0; i < g->node_count(); ++i) out.push_back(std::to_string(i + 1));
    return out;
  }
  const PowerNetwork& net = std::get<PowerNetwork>(file);
  std::vector<std::string> out;
  for (int i = 0; i < net.bus_count(); ++i) out.push_back(std::to_string(i + 1));
  return out;
}

Equilibrium parse_equilibrium(const json& doc, const std::vector<std::string>& labels) {
  if (!doc.contains("theta_deg")) throw ParseError("equilibrium file needs theta_deg");
  std::map<std::string, int> index;
  for (size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<int>(i);

  Equilibrium eq;
  eq.theta = numerics::Vector::Zero(labels.size());
  std::vector<bool> seen(labels.size(), false);
  for (const auto& [id, value] : doc.at("theta_deg").items()) {
    auto it = index.find(id);
    if (it == index.end()) throw ParseError("equilibrium references unknown node " + id);
    if (!value.is_number()) throw ParseError("theta_deg values must be numbers");
    eq.theta[it->second] = value.get<double>() * M_PI / 180.0;
    seen[it->second] = true;
  }
  for (size_t i = 0; i < labels.size(); ++i) {
    if (!seen[i]) throw ParseError("equilibrium misses node " + labels[i]);
  }
  const std::string ref = doc.contains("reference")
                              ? id_to_string(doc.at("reference"))
                              : labels.front();
  auto it = index.find(ref);
  if (it == index.end()) throw ParseError("unknown reference node " + ref);
  eq.reference_bus = it->second;
  eq.theta.array() -= eq.theta[eq.reference_bus];
  return eq;
}

Equilibrium load_equilibrium(const std::string& path,
                             const std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_equilibrium(doc, labels);
}

json equilibrium_to_json(const Equilibrium& eq, const std::vector<std::string>& labels) {
  json doc;
  doc["reference"] = labels[eq.reference_bus];
  json theta;
  for (size_t i = 0; i < labels.size(); ++i) {
    theta[labels[i]] = eq.theta[static_cast<int>(i)] * 180.0 / M_PI;
  }
  doc["theta_deg"] = theta;
  return doc;
}

std::vector<int> parse_node_list(const std::string& csv,
                                 const std::vector<std::string>& labels) {
  std::map<std::string, int> index;
  for (size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<int>(i);
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    // Trim blanks around the id.
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos) continue;
    token = token.substr(first, last - first + 1);
    auto it = index.find(token);
    if (it == index.end()) throw ParseError("unknown node id " + token);
    out.push_back(it->second);
  }
  if (out.empty()) throw ParseError("empty node list");
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

json make_report(const std::string& command) {
  json report;
  report["schema"] = 1;
  report["command"] = command;
  const auto now = std::chrono::system_clock::now();
  report["timestamp"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  return report;
}

}  // namespace effres::io
