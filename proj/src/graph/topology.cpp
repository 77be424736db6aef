#include "fleam/graph/topology.hpp"

#include <algorithm>
#include <sstream>

#include "fleam/core/csv.hpp"
#include "fleam/core/errors.hpp"

namespace fleam::graph {

NodeRole role_from_string(const std::string& s) {
  if (s == "fog") return NodeRole::fog;
  if (s == "cloud") return NodeRole::cloud;
  if (s == "device") return NodeRole::device;
  throw ConfigError("unknown node role: " + s);
}

std::string role_to_string(NodeRole r) {
  switch (r) {
    case NodeRole::fog: return "fog";
    case NodeRole::cloud: return "cloud";
    case NodeRole::device: return "device";
  }
  return "fog";
}

int FogTopology::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

int FogTopology::add_node(const std::string& name, NodeRole role) {
  if (name.empty()) throw ConfigError("node name cannot be empty");
  const int existing = index_of(name);
  if (existing >= 0) {
    roles_[static_cast<std::size_t>(existing)] = role;
    return existing;
  }
  names_.push_back(name);
  roles_.push_back(role);
  adjacency_.emplace_back();
  return node_count() - 1;
}

void FogTopology::add_edge(const std::string& a, const std::string& b, double length) {
  if (a == b) throw ConfigError("self-loop rejected: " + a);
  if (!(length > 0)) throw ConfigError("edge length must be positive");
  int ia = index_of(a);
  if (ia < 0) ia = add_node(a);
  int ib = index_of(b);
  if (ib < 0) ib = add_node(b);
  for (const Edge& e : edges_) {
    if ((e.a == ia && e.b == ib) || (e.a == ib && e.b == ia)) {
      throw ConfigError("duplicate edge rejected: " + a + " -- " + b);
    }
  }
  edges_.push_back({ia, ib, length});
  adjacency_[static_cast<std::size_t>(ia)].push_back({ib, length});
  adjacency_[static_cast<std::size_t>(ib)].push_back({ia, length});
  if (length != 1.0) weighted_ = true;
}

TopologyFile parse_topology_text(const std::string& text) {
  TopologyFile out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = csv::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    std::string kw;
    ls >> kw;
    if (kw == "node") {
      std::string name, role;
      ls >> name >> role;
      if (name.empty()) throw ConfigError("topology line " + std::to_string(lineno) + ": node needs a name");
      out.topology.add_node(name, role.empty() ? NodeRole::fog : role_from_string(role));
    } else if (kw == "edge") {
      std::string a, b;
      double length = 1.0;
      ls >> a >> b;
      if (a.empty() || b.empty()) {
        throw ConfigError("topology line " + std::to_string(lineno) + ": edge needs two nodes");
      }
      if (!(ls >> length)) length = 1.0;
      out.topology.add_edge(a, b, length);
    } else if (kw == "route") {
      AttackRoute route;
      std::string name;
      while (ls >> name) route.push_back(name);
      if (route.size() < 2) {
        throw ConfigError("topology line " + std::to_string(lineno) + ": route needs >= 2 nodes");
      }
      out.routes.push_back(std::move(route));
    } else {
      throw ConfigError("topology line " + std::to_string(lineno) + ": unknown keyword '" + kw + "'");
    }
  }
  return out;
}

TopologyFile parse_topology_file(const std::string& path) {
  std::string text;
  for (const std::string& l : csv::read_lines(path)) {
    text += l;
    text.push_back('\n');
  }
  return parse_topology_text(text);
}

}  // namespace fleam::graph
