#pragma once

#include <string>
#include <vector>

#include "fleam/graph/centrality.hpp"
#include "fleam/graph/topology.hpp"

namespace fleam::graph {

struct PlacementResult {
  std::vector<int> picks;            // node indices in pick order
  std::vector<int> covered_per_pick; // newly covered routes at each pick
  int covered_routes = 0;
  bool no_candidates = false;        // no fog node lies on any route
};

// Greedy checkpoint selection: picks up to budget fog-role nodes lying on
// at least one attack route, maximizing the number of newly covered routes
// per pick; ties fall to higher betweenness, then higher closeness, then
// lower node index. Once all routes are covered, remaining budget goes to
// the best-ranked leftover candidates.
PlacementResult select_checkpoints(const FogTopology& g,
                                   const std::vector<AttackRoute>& routes, int budget);

}  // namespace fleam::graph
