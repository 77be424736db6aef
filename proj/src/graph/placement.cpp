#include "fleam/graph/placement.hpp"

#include <algorithm>
#include <set>

#include "fleam/core/errors.hpp"

namespace fleam::graph {

namespace {

// Validates the route and returns it as node indices.
std::vector<int> route_indices(const FogTopology& g, const AttackRoute& route) {
  std::vector<int> idx;
  idx.reserve(route.size());
  for (const std::string& name : route) {
    const int i = g.index_of(name);
    if (i < 0) throw ConfigError("route references unknown node: " + name);
    idx.push_back(i);
  }
  for (std::size_t s = 0; s + 1 < idx.size(); ++s) {
    bool adjacent = false;
    for (const auto& [v, len] : g.neighbors(idx[s])) {
      (void)len;
      if (v == idx[s + 1]) {
        adjacent = true;
        break;
      }
    }
    if (!adjacent) {
      throw ConfigError("route step " + route[s] + " -> " + route[s + 1] +
                        " is not an edge of the topology");
    }
  }
  return idx;
}

}  // namespace

PlacementResult select_checkpoints(const FogTopology& g,
                                   const std::vector<AttackRoute>& routes, int budget) {
  if (budget < 1) throw ConfigError("placement budget must be >= 1");
  if (routes.empty()) throw ConfigError("placement needs at least one attack route");

  std::vector<std::set<int>> route_nodes;
  route_nodes.reserve(routes.size());
  for (const AttackRoute& r : routes) {
    const auto idx = route_indices(g, r);
    route_nodes.emplace_back(idx.begin(), idx.end());
  }

  // candidates: fog nodes on at least one route
  std::vector<int> candidates;
  for (int i = 0; i < g.node_count(); ++i) {
    if (g.role_of(i) != NodeRole::fog) continue;
    for (const auto& rn : route_nodes) {
      if (rn.count(i)) {
        candidates.push_back(i);
        break;
      }
    }
  }

  PlacementResult result;
  if (candidates.empty()) {
    result.no_candidates = true;
    return result;
  }

  const std::vector<double> btw = betweenness(g);
  const std::vector<double> cls = closeness(g);

  std::vector<bool> covered(routes.size(), false);
  std::vector<bool> picked(static_cast<std::size_t>(g.node_count()), false);
  while (static_cast<int>(result.picks.size()) < budget) {
    int best = -1;
    int best_gain = -1;
    for (int c : candidates) {
      if (picked[static_cast<std::size_t>(c)]) continue;
      int gain = 0;
      for (std::size_t r = 0; r < routes.size(); ++r) {
        if (!covered[r] && route_nodes[r].count(c)) ++gain;
      }
      if (best < 0) {
        best = c;
        best_gain = gain;
        continue;
      }
      const auto key = [&](int n, int gn) {
        return std::make_tuple(gn, btw[static_cast<std::size_t>(n)],
                               cls[static_cast<std::size_t>(n)], -n);
      };
      if (key(c, gain) > key(best, best_gain)) {
        best = c;
        best_gain = gain;
      }
    }
    if (best < 0) break;  // candidates exhausted before the budget
    picked[static_cast<std::size_t>(best)] = true;
    result.picks.push_back(best);
    result.covered_per_pick.push_back(best_gain);
    for (std::size_t r = 0; r < routes.size(); ++r) {
      if (route_nodes[r].count(best)) covered[r] = true;
    }
  }
  for (bool c : covered) result.covered_routes += c ? 1 : 0;
  return result;
}

}  // namespace fleam::graph
