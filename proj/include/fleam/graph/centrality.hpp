#pragma once

#include <vector>

#include "fleam/graph/topology.hpp"

namespace fleam::graph {

// Shortest-path distances and path counts from one source; distances are
// hop counts on unweighted graphs and summed lengths otherwise.
// Unreachable nodes keep an infinite distance and zero count.
struct ShortestPaths {
  std::vector<double> dist;
  std::vector<double> count;  // number of distinct shortest paths
};

ShortestPaths shortest_paths_from(const FogTopology& g, int source);

// Graph-level degree centralization: sum of (max degree - degree) over all
// nodes, normalized by (z-1)(z-2). 1 on stars, 0 on regular graphs.
// Requires z >= 3.
double degree_centralization(const FogTopology& g);

struct CentralityReport {
  std::vector<int> degree;
  std::vector<double> betweenness;
  std::vector<double> closeness;
  std::vector<bool> closeness_defined;  // false for isolated nodes
  double centralization = 0.0;
  bool centralization_defined = false;
  bool connected = true;
  int components = 1;
  // node indices ranked by descending score; ties keep ascending index
  std::vector<int> betweenness_ranking;
  std::vector<int> closeness_ranking;
};

// Pair-counting betweenness: for each pair j < k and interior node i,
// credit sigma_jk(i) / sigma_jk, accumulated in fixed (j, k, i) order.
// Quadratic in nodes per source; exact for the small graphs this targets.
std::vector<double> betweenness(const FogTopology& g);

// 1 / sum of shortest-path distances to the node's component peers.
std::vector<double> closeness(const FogTopology& g, std::vector<bool>* defined = nullptr);

CentralityReport centrality_report(const FogTopology& g);

}  // namespace fleam::graph
