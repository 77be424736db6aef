#include "fleam/graph/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "fleam/core/errors.hpp"

namespace fleam::graph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// tie tolerance for summed edge lengths
inline bool close(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

ShortestPaths bfs_paths(const FogTopology& g, int source) {
  const int z = g.node_count();
  ShortestPaths sp{std::vector<double>(static_cast<std::size_t>(z), kInf),
                   std::vector<double>(static_cast<std::size_t>(z), 0.0)};
  sp.dist[static_cast<std::size_t>(source)] = 0;
  sp.count[static_cast<std::size_t>(source)] = 1;
  std::queue<int> frontier;
  frontier.push(source);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (const auto& [v, len] : g.neighbors(u)) {
      (void)len;
      const double cand = sp.dist[static_cast<std::size_t>(u)] + 1;
      if (sp.dist[static_cast<std::size_t>(v)] == kInf) {
        sp.dist[static_cast<std::size_t>(v)] = cand;
        sp.count[static_cast<std::size_t>(v)] = sp.count[static_cast<std::size_t>(u)];
        frontier.push(v);
      } else if (sp.dist[static_cast<std::size_t>(v)] == cand) {
        sp.count[static_cast<std::size_t>(v)] += sp.count[static_cast<std::size_t>(u)];
      }
    }
  }
  return sp;
}

ShortestPaths dijkstra_paths(const FogTopology& g, int source) {
  const int z = g.node_count();
  ShortestPaths sp{std::vector<double>(static_cast<std::size_t>(z), kInf),
                   std::vector<double>(static_cast<std::size_t>(z), 0.0)};
  sp.dist[static_cast<std::size_t>(source)] = 0;
  sp.count[static_cast<std::size_t>(source)] = 1;
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  heap.push({0.0, source});
  std::vector<bool> settled(static_cast<std::size_t>(z), false);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[static_cast<std::size_t>(u)]) continue;
    settled[static_cast<std::size_t>(u)] = true;
    for (const auto& [v, len] : g.neighbors(u)) {
      const double cand = d + len;
      double& dv = sp.dist[static_cast<std::size_t>(v)];
      if (cand < dv && !close(cand, dv)) {
        dv = cand;
        sp.count[static_cast<std::size_t>(v)] = sp.count[static_cast<std::size_t>(u)];
        heap.push({cand, v});
      } else if (close(cand, dv)) {
        sp.count[static_cast<std::size_t>(v)] += sp.count[static_cast<std::size_t>(u)];
      }
    }
  }
  return sp;
}

}  // namespace

ShortestPaths shortest_paths_from(const FogTopology& g, int source) {
  if (source < 0 || source >= g.node_count()) throw DomainError("source node out of range");
  return g.weighted() ? dijkstra_paths(g, source) : bfs_paths(g, source);
}

double degree_centralization(const FogTopology& g) {
  const int z = g.node_count();
  if (z < 3) {
    throw DomainError("degree centralization needs at least 3 nodes");
  }
  int max_degree = 0;
  for (int i = 0; i < z; ++i) max_degree = std::max(max_degree, g.degree(i));
  double sum = 0;
  for (int i = 0; i < z; ++i) sum += max_degree - g.degree(i);
  return sum / (static_cast<double>(z - 1) * static_cast<double>(z - 2));
}

std::vector<double> betweenness(const FogTopology& g) {
  const int z = g.node_count();
  std::vector<ShortestPaths> from;
  from.reserve(static_cast<std::size_t>(z));
  for (int s = 0; s < z; ++s) from.push_back(shortest_paths_from(g, s));

  std::vector<double> score(static_cast<std::size_t>(z), 0.0);
  for (int j = 0; j < z; ++j) {
    for (int k = j + 1; k < z; ++k) {
      const double d_jk = from[static_cast<std::size_t>(j)].dist[static_cast<std::size_t>(k)];
      const double sigma_jk = from[static_cast<std::size_t>(j)].count[static_cast<std::size_t>(k)];
      if (d_jk == kInf || sigma_jk == 0) continue;
      for (int i = 0; i < z; ++i) {
        if (i == j || i == k) continue;
        const double d_ji = from[static_cast<std::size_t>(j)].dist[static_cast<std::size_t>(i)];
        const double d_ik = from[static_cast<std::size_t>(i)].dist[static_cast<std::size_t>(k)];
        if (d_ji == kInf || d_ik == kInf) continue;
        if (!close(d_ji + d_ik, d_jk)) continue;
        const double through = from[static_cast<std::size_t>(j)].count[static_cast<std::size_t>(i)] *
                               from[static_cast<std::size_t>(i)].count[static_cast<std::size_t>(k)];
        score[static_cast<std::size_t>(i)] += through / sigma_jk;
      }
    }
  }
  return score;
}

std::vector<double> closeness(const FogTopology& g, std::vector<bool>* defined) {
  const int z = g.node_count();
  std::vector<double> score(static_cast<std::size_t>(z), 0.0);
  if (defined) defined->assign(static_cast<std::size_t>(z), false);
  for (int i = 0; i < z; ++i) {
    const ShortestPaths sp = shortest_paths_from(g, i);
    double sum = 0;
    int reachable = 0;
    for (int j = 0; j < z; ++j) {
      if (j == i || sp.dist[static_cast<std::size_t>(j)] == kInf) continue;
      sum += sp.dist[static_cast<std::size_t>(j)];
      ++reachable;
    }
    if (reachable == 0) {
      score[static_cast<std::size_t>(i)] = 0.0;  // isolated: undefined
      continue;
    }
    score[static_cast<std::size_t>(i)] = 1.0 / sum;
    if (defined) (*defined)[static_cast<std::size_t>(i)] = true;
  }
  return score;
}

namespace {

std::vector<int> ranking_desc(const std::vector<double>& score) {
  std::vector<int> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&score](int a, int b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  return order;
}

}  // namespace

CentralityReport centrality_report(const FogTopology& g) {
  const int z = g.node_count();
  if (z < 1) throw DomainError("topology has no nodes");
  CentralityReport rep;
  rep.degree.resize(static_cast<std::size_t>(z));
  for (int i = 0; i < z; ++i) rep.degree[static_cast<std::size_t>(i)] = g.degree(i);
  rep.betweenness = betweenness(g);
  rep.closeness = closeness(g, &rep.closeness_defined);
  if (z >= 3) {
    rep.centralization = degree_centralization(g);
    rep.centralization_defined = true;
  }

  // component count via the distance maps
  std::vector<int> component(static_cast<std::size_t>(z), -1);
  int components = 0;
  for (int i = 0; i < z; ++i) {
    if (component[static_cast<std::size_t>(i)] >= 0) continue;
    const ShortestPaths sp = shortest_paths_from(g, i);
    for (int j = 0; j < z; ++j) {
      if (sp.dist[static_cast<std::size_t>(j)] != kInf) {
        component[static_cast<std::size_t>(j)] = components;
      }
    }
    ++components;
  }
  rep.components = components;
  rep.connected = components == 1;
  rep.betweenness_ranking = ranking_desc(rep.betweenness);
  rep.closeness_ranking = ranking_desc(rep.closeness);
  return rep;
}

}  // namespace fleam::graph
