#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "fleam/core/errors.hpp"
#include "fleam/core/rng.hpp"
#include "fleam/graph/centrality.hpp"
#include "fleam/graph/placement.hpp"
#include "fleam/graph/topology.hpp"

#include "../common/graph_oracles.hpp"

using namespace fleam;
using namespace fleam::graph;

namespace {

FogTopology star5() {
  FogTopology g;
  for (int i = 0; i < 5; ++i) g.add_node("n" + std::to_string(i));
  for (int i = 1; i < 5; ++i) g.add_edge("n0", "n" + std::to_string(i));
  return g;
}

FogTopology cycle(int z) {
  FogTopology g;
  for (int i = 0; i < z; ++i) g.add_node("n" + std::to_string(i));
  for (int i = 0; i < z; ++i) {
    g.add_edge("n" + std::to_string(i), "n" + std::to_string((i + 1) % z));
  }
  return g;
}

FogTopology path(int z) {
  FogTopology g;
  for (int i = 0; i < z; ++i) g.add_node("n" + std::to_string(i));
  for (int i = 0; i + 1 < z; ++i) {
    g.add_edge("n" + std::to_string(i), "n" + std::to_string(i + 1));
  }
  return g;
}

FogTopology complete(int z) {
  FogTopology g;
  for (int i = 0; i < z; ++i) g.add_node("n" + std::to_string(i));
  for (int i = 0; i < z; ++i) {
    for (int j = i + 1; j < z; ++j) {
      g.add_edge("n" + std::to_string(i), "n" + std::to_string(j));
    }
  }
  return g;
}

}  // namespace

TEST_CASE("degree centralization: star 1, cycle 0, path 1/3, small-z error") {
  CHECK(degree_centralization(star5()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(degree_centralization(cycle(5)) == 0.0);
  CHECK(degree_centralization(path(4)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  FogTopology tiny;
  tiny.add_node("a");
  tiny.add_node("b");
  tiny.add_edge("a", "b");
  CHECK_THROWS_AS(degree_centralization(tiny), DomainError);
}

TEST_CASE("betweenness: path middle carries the single intermediated pair") {
  const auto b3 = betweenness(path(3));
  CHECK(b3[0] == 0.0);
  CHECK(b3[1] == 1.0);
  CHECK(b3[2] == 0.0);

  const auto bk4 = betweenness(complete(4));
  for (double v : bk4) CHECK(v == 0.0);
}

TEST_CASE("closeness: star, complete, and path values") {
  std::vector<bool> defined;
  const auto star = closeness(star5(), &defined);
  CHECK(star[0] == doctest::Approx(0.25).epsilon(1e-15));          // center: 4 distances of 1
  CHECK(star[1] == doctest::Approx(1.0 / 7.0).epsilon(1e-15));     // leaf: 1 + 3*2
  for (bool d : defined) CHECK(d);

  const auto k6 = closeness(complete(6));
  for (double v : k6) CHECK(v == doctest::Approx(1.0 / 5.0).epsilon(1e-15));

  const auto p3 = closeness(path(3));
  CHECK(p3[1] == doctest::Approx(0.5).epsilon(1e-15));

  FogTopology lonely;
  lonely.add_node("a");
  lonely.add_node("b");
  lonely.add_node("c");
  lonely.add_edge("b", "c");
  std::vector<bool> def2;
  const auto iso = closeness(lonely, &def2);
  CHECK_FALSE(def2[0]);
  CHECK(iso[0] == 0.0);
  CHECK(def2[1]);
}

TEST_CASE("betweenness and closeness match exhaustive enumeration exactly") {
  Rng rng(606);
  for (int trial = 0; trial < 60; ++trial) {
    const int z = 3 + static_cast<int>(rng.next_below(6));  // up to 8 nodes
    FogTopology g = fleam::testing::random_connected_graph(z, 0.45, rng);
    const auto got_b = betweenness(g);
    const auto want_b = fleam::testing::brute_force_betweenness(g);
    const auto got_c = closeness(g);
    const auto want_c = fleam::testing::brute_force_closeness(g);
    for (int i = 0; i < z; ++i) {
      CHECK(got_b[static_cast<std::size_t>(i)] == want_b[static_cast<std::size_t>(i)]);
      CHECK(got_c[static_cast<std::size_t>(i)] == want_c[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("betweenness with edge lengths: the short detour wins") {
  FogTopology g;
  g.add_node("a");
  g.add_node("b");
  g.add_node("via");
  g.add_edge("a", "b", 10.0);
  g.add_edge("a", "via", 2.0);
  g.add_edge("via", "b", 2.0);
  const auto b = betweenness(g);
  CHECK(b[g.index_of("via")] == 1.0);  // a-b routes through via
}

TEST_CASE("total betweenness equals the interior-hop count over pairs") {
  // sum over pairs of (shortest-path length - 1): every pair distributes
  // exactly one unit of credit per interior hop
  Rng rng(707);
  for (int trial = 0; trial < 20; ++trial) {
    const int z = 4 + static_cast<int>(rng.next_below(5));
    FogTopology g = fleam::testing::random_connected_graph(z, 0.4, rng);
    const auto b = betweenness(g);
    double total = 0;
    for (double v : b) total += v;
    double expected = 0;
    for (int j = 0; j < z; ++j) {
      const ShortestPaths sp = shortest_paths_from(g, j);
      for (int k = j + 1; k < z; ++k) {
        expected += sp.dist[static_cast<std::size_t>(k)] - 1.0;
      }
    }
    CHECK(std::abs(total - expected) <= 1e-9);
  }
}

TEST_CASE("relabeling invariance: permuting ids permutes scores") {
  Rng rng(808);
  FogTopology g = fleam::testing::random_connected_graph(7, 0.4, rng);
  // rebuild with reversed insertion order
  FogTopology h;
  for (int i = 6; i >= 0; --i) h.add_node("n" + std::to_string(i));
  for (const auto& e : g.edges()) {
    h.add_edge(g.name_of(e.a), g.name_of(e.b), e.length);
  }
  const auto bg = betweenness(g);
  const auto bh = betweenness(h);
  const auto cg = closeness(g);
  const auto ch = closeness(h);
  for (int i = 0; i < 7; ++i) {
    const int hi = h.index_of(g.name_of(i));
    CHECK(bg[static_cast<std::size_t>(i)] ==
          doctest::Approx(bh[static_cast<std::size_t>(hi)]).epsilon(1e-12));
    CHECK(cg[static_cast<std::size_t>(i)] ==
          doctest::Approx(ch[static_cast<std::size_t>(hi)]).epsilon(1e-12));
  }
}

TEST_CASE("topology parsing and validation") {
  TopologyFile tf = parse_topology_text(
      "# sample\n"
      "node cloud0 cloud\n"
      "node f1 fog\n"
      "node f2 fog\n"
      "node dev1 device\n"
      "edge cloud0 f1\n"
      "edge f1 f2 2.5\n"
      "edge f2 dev1\n"
      "route dev1 f2 f1 cloud0\n");
  CHECK(tf.topology.node_count() == 4);
  CHECK(tf.topology.weighted());
  CHECK(tf.routes.size() == 1);
  CHECK(tf.topology.role_of(tf.topology.index_of("cloud0")) == NodeRole::cloud);

  CHECK_THROWS_AS(parse_topology_text("edge a a\n"), ConfigError);
  CHECK_THROWS_AS(parse_topology_text("edge a b\nedge b a\n"), ConfigError);
  CHECK_THROWS_AS(parse_topology_text("edge a b -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_topology_text("wibble a b\n"), ConfigError);
}

TEST_CASE("select_checkpoints: forced choice and disjoint-route coverage") {
  TopologyFile tf = parse_topology_text(
      "node src1 device\n"
      "node f1 fog\n"
      "node v1 cloud\n"
      "edge src1 f1\n"
      "edge f1 v1\n"
      "route src1 f1 v1\n");
  PlacementResult r = select_checkpoints(tf.topology, tf.routes, 1);
  REQUIRE(r.picks.size() == 1);
  CHECK(tf.topology.name_of(r.picks[0]) == "f1");
  CHECK(r.covered_routes == 1);

  TopologyFile two = parse_topology_text(
      "node s1 device\nnode s2 device\n"
      "node f1 fog\nnode f2 fog\n"
      "node v1 cloud\nnode v2 cloud\n"
      "edge s1 f1\nedge f1 v1\n"
      "edge s2 f2\nedge f2 v2\n"
      "route s1 f1 v1\n"
      "route s2 f2 v2\n");
  PlacementResult r2 = select_checkpoints(two.topology, two.routes, 2);
  REQUIRE(r2.picks.size() == 2);
  std::set<std::string> names{two.topology.name_of(r2.picks[0]),
                              two.topology.name_of(r2.picks[1])};
  CHECK(names == std::set<std::string>{"f1", "f2"});
  CHECK(r2.covered_routes == 2);
}

TEST_CASE("select_checkpoints: greedy matches exhaustive pair search") {
  // 8 nodes, 3 routes sharing fog hubs
  TopologyFile tf = parse_topology_text(
      "node s1 device\nnode s2 device\nnode s3 device\n"
      "node f1 fog\nnode f2 fog\nnode f3 fog\n"
      "node v1 cloud\nnode v2 cloud\n"
      "edge s1 f1\nedge s2 f1\nedge s3 f3\n"
      "edge f1 f2\nedge f3 f2\nedge f2 v1\nedge f2 v2\n"
      "route s1 f1 f2 v1\n"
      "route s2 f1 f2 v2\n"
      "route s3 f3 f2 v1\n");
  PlacementResult greedy = select_checkpoints(tf.topology, tf.routes, 2);

  // exhaustive search over all fog pairs for the best covered-route count
  std::vector<int> fogs;
  for (int i = 0; i < tf.topology.node_count(); ++i) {
    if (tf.topology.role_of(i) == NodeRole::fog) fogs.push_back(i);
  }
  int best_cover = 0;
  for (std::size_t a = 0; a < fogs.size(); ++a) {
    for (std::size_t b = a + 1; b < fogs.size(); ++b) {
      int cover = 0;
      for (const AttackRoute& route : tf.routes) {
        for (const std::string& name : route) {
          const int idx = tf.topology.index_of(name);
          if (idx == fogs[a] || idx == fogs[b]) {
            ++cover;
            break;
          }
        }
      }
      best_cover = std::max(best_cover, cover);
    }
  }
  CHECK(greedy.covered_routes == best_cover);
  // f2 sits on every route, so the first greedy pick covers all three
  CHECK(tf.topology.name_of(greedy.picks[0]) == "f2");
}

TEST_CASE("select_checkpoints: no fog node on a route yields a warning") {
  TopologyFile tf = parse_topology_text(
      "node s1 device\nnode v1 cloud\n"
      "edge s1 v1\n"
      "route s1 v1\n");
  PlacementResult r = select_checkpoints(tf.topology, tf.routes, 1);
  CHECK(r.no_candidates);
  CHECK(r.picks.empty());

  CHECK_THROWS_AS(select_checkpoints(tf.topology, {{"s1", "unknown"}}, 1), ConfigError);
  CHECK_THROWS_AS(select_checkpoints(tf.topology, tf.routes, 0), ConfigError);
}

TEST_CASE("centrality report: rankings and component bookkeeping") {
  CentralityReport rep = centrality_report(star5());
  CHECK(rep.connected);
  CHECK(rep.components == 1);
  CHECK(rep.centralization_defined);
  CHECK(rep.centralization == doctest::Approx(1.0));
  CHECK(rep.betweenness_ranking[0] == 0);  // the hub
  CHECK(rep.closeness_ranking[0] == 0);
  CHECK(rep.degree[0] == 4);
}

TEST_CASE("degree centralization stays inside [0, 1] on random graphs") {
  Rng rng(909);
  for (int trial = 0; trial < 100; ++trial) {
    const int z = 3 + static_cast<int>(rng.next_below(8));
    FogTopology g = fleam::testing::random_connected_graph(z, 0.2 + 0.6 * rng.next_double(), rng);
    const double c = degree_centralization(g);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
}
