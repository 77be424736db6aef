#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fleam::graph {

enum class NodeRole { fog, cloud, device };

NodeRole role_from_string(const std::string& s);
std::string role_to_string(NodeRole r);

// Undirected graph of fog/cloud/device nodes with optional positive edge
// lengths (default 1). Self-loops and duplicate edges are rejected.
class FogTopology {
 public:
  struct Edge {
    int a = 0, b = 0;
    double length = 1.0;
  };

  int add_node(const std::string& name, NodeRole role = NodeRole::fog);
  void add_edge(const std::string& a, const std::string& b, double length = 1.0);

  int node_count() const { return static_cast<int>(names_.size()); }
  int index_of(const std::string& name) const;           // -1 when absent
  const std::string& name_of(int idx) const { return names_[static_cast<std::size_t>(idx)]; }
  NodeRole role_of(int idx) const { return roles_[static_cast<std::size_t>(idx)]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::pair<int, double>>& neighbors(int idx) const {
    return adjacency_[static_cast<std::size_t>(idx)];
  }
  bool weighted() const { return weighted_; }
  int degree(int idx) const { return static_cast<int>(neighbors(idx).size()); }

 private:
  std::vector<std::string> names_;
  std::vector<NodeRole> roles_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  bool weighted_ = false;
};

// A source-to-victim path given by node names.
using AttackRoute = std::vector<std::string>;

struct TopologyFile {
  FogTopology topology;
  std::vector<AttackRoute> routes;
};

// Line format:
//   node <name> [fog|cloud|device]
//   edge <a> <b> [length]
//   route <n1> <n2> ... <nk>
// Nodes first referenced by an edge default to the fog role.
TopologyFile parse_topology_file(const std::string& path);
TopologyFile parse_topology_text(const std::string& text);

}  // namespace fleam::graph
