#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "edgeq/graph.hpp"
#include "edgeq/rng.hpp"

using namespace edgeq;

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

std::set<Edge> edge_set(const CollabGraph& g) { return {g.edges.begin(), g.edges.end()}; }

std::vector<std::vector<double>> random_states(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<std::vector<double>> states(n);
  for (auto& s : states) {
    s.resize(dim);
    for (auto& x : s) x = rng.uniform(-2.0, 2.0);
  }
  return states;
}

}  // namespace

TEST_CASE("ring of four") {
  TopologySpec spec;
  spec.kind = Topology::kRing;
  const auto g = build_graph(4, spec);
  CHECK(edge_set(g) == std::set<Edge>{{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  CHECK(g.neighbors(0) == std::vector<std::size_t>{1, 3});
}

TEST_CASE("degenerate rings") {
  TopologySpec spec;
  spec.kind = Topology::kRing;
  CHECK(build_graph(1, spec).edges.empty());
  CHECK(edge_set(build_graph(2, spec)) == std::set<Edge>{{0, 1}});
  CHECK(edge_set(build_graph(3, spec)) == std::set<Edge>{{0, 1}, {1, 2}, {0, 2}});
}

TEST_CASE("star centers on device zero") {
  TopologySpec spec;
  spec.kind = Topology::kStar;
  const auto g = build_graph(5, spec);
  CHECK(edge_set(g) == std::set<Edge>{{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  CHECK(g.neighbors(0).size() == 4);
  CHECK(g.neighbors(3) == std::vector<std::size_t>{0});
}

TEST_CASE("complete graph has all pairs") {
  TopologySpec spec;
  spec.kind = Topology::kComplete;
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto g = build_graph(n, spec);
    CHECK(g.edges.size() == n * (n - 1) / 2);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        CHECK(g.has_edge(a, b) == (a != b));
      }
    }
  }
}

TEST_CASE("cluster topology connects devices sharing a cluster") {
  TopologySpec spec;
  spec.kind = Topology::kEdgeCluster;
  spec.cluster_count = 2;
  const auto g = build_graph(8, spec);
  // Devices 0,2,4,6 form one clique, 1,3,5,7 the other: 2 * C(4,2) edges.
  CHECK(g.edges.size() == 12);
  CHECK(g.has_edge(0, 2));
  CHECK(g.has_edge(1, 7));
  CHECK_FALSE(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(2, 5));
}

TEST_CASE("cluster topology needs a positive cluster count") {
  TopologySpec spec;
  spec.kind = Topology::kEdgeCluster;
  spec.cluster_count = 0;
  CHECK_THROWS_AS(build_graph(4, spec), std::invalid_argument);
}

TEST_CASE("explicit edges are validated and normalized") {
  TopologySpec spec;
  spec.kind = Topology::kExplicit;
  spec.edges = {{3, 1}, {1, 3}, {0, 2}};
  const auto g = build_graph(4, spec);
  CHECK(edge_set(g) == std::set<Edge>{{1, 3}, {0, 2}});

  TopologySpec bad = spec;
  bad.edges = {{0, 4}};
  CHECK_THROWS_AS(build_graph(4, bad), std::invalid_argument);
  bad.edges = {{2, 2}};
  CHECK_THROWS_AS(build_graph(4, bad), std::invalid_argument);
}

TEST_CASE("topology and aggregation names round-trip") {
  for (auto t : {Topology::kRing, Topology::kStar, Topology::kComplete,
                 Topology::kEdgeCluster, Topology::kExplicit}) {
    CHECK(topology_from_string(to_string(t)) == t);
  }
  CHECK_THROWS(topology_from_string("mesh"));
  for (auto k : {AggregationKind::kMean, AggregationKind::kMax}) {
    CHECK(aggregation_from_string(to_string(k)) == k);
  }
  CHECK_THROWS(aggregation_from_string("median"));
}

TEST_CASE("isolated devices aggregate to zero") {
  TopologySpec spec;
  spec.kind = Topology::kExplicit;
  spec.edges = {{0, 1}};
  const auto g = build_graph(3, spec);  // device 2 has no neighbors
  Rng rng(3);
  const auto states = random_states(3, 5, rng);
  CHECK(aggregate_neighbors(g, states, 2) == std::vector<double>(5, 0.0));
}

TEST_CASE("single neighbor aggregates to that neighbor's state") {
  TopologySpec spec;
  spec.kind = Topology::kExplicit;
  spec.edges = {{0, 1}};
  const auto g = build_graph(2, spec);
  Rng rng(4);
  const auto states = random_states(2, 4, rng);
  const auto agg = aggregate_neighbors(g, states, 0);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(agg[k] == doctest::Approx(states[1][k]).epsilon(1e-15));
  }
}

TEST_CASE("mean aggregation averages element-wise") {
  TopologySpec spec;
  spec.kind = Topology::kStar;
  const auto g = build_graph(4, spec);
  std::vector<std::vector<double>> states = {
      {0.0, 0.0}, {1.0, -2.0}, {3.0, 4.0}, {-1.0, 7.0}};
  const auto agg = aggregate_neighbors(g, states, 0, AggregationKind::kMean);
  CHECK(agg[0] == doctest::Approx(1.0));
  CHECK(agg[1] == doctest::Approx(3.0));
}

TEST_CASE("max aggregation takes element-wise maxima") {
  TopologySpec spec;
  spec.kind = Topology::kStar;
  const auto g = build_graph(4, spec);
  std::vector<std::vector<double>> states = {
      {0.0, 0.0}, {1.0, -2.0}, {3.0, -4.0}, {-1.0, -7.0}};
  const auto agg = aggregate_neighbors(g, states, 0, AggregationKind::kMax);
  CHECK(agg == std::vector<double>{3.0, -2.0});
}

TEST_CASE("aggregation ignores the edge insertion order") {
  TopologySpec a;
  a.kind = Topology::kExplicit;
  a.edges = {{0, 1}, {0, 2}, {0, 3}, {2, 3}};
  TopologySpec b = a;
  std::reverse(b.edges.begin(), b.edges.end());
  std::swap(b.edges[0].first, b.edges[0].second);
  const auto ga = build_graph(4, a);
  const auto gb = build_graph(4, b);
  CHECK(ga.edges == gb.edges);
  Rng rng(6);
  const auto states = random_states(4, 5, rng);
  for (std::size_t d = 0; d < 4; ++d) {
    CHECK(aggregate_neighbors(ga, states, d) == aggregate_neighbors(gb, states, d));
    CHECK(aggregate_neighbors(ga, states, d, AggregationKind::kMax) ==
          aggregate_neighbors(gb, states, d, AggregationKind::kMax));
  }
}

TEST_CASE("aggregates stay within the neighbors' component ranges") {
  TopologySpec spec;
  spec.kind = Topology::kComplete;
  const auto g = build_graph(6, spec);
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto states = random_states(6, 5, rng);
    for (std::size_t d = 0; d < 6; ++d) {
      for (auto kind : {AggregationKind::kMean, AggregationKind::kMax}) {
        const auto agg = aggregate_neighbors(g, states, d, kind);
        for (std::size_t k = 0; k < 5; ++k) {
          double lo = 1e300, hi = -1e300;
          for (std::size_t nb : g.neighbors(d)) {
            lo = std::min(lo, states[nb][k]);
            hi = std::max(hi, states[nb][k]);
          }
          CHECK(agg[k] >= lo - 1e-12);
          CHECK(agg[k] <= hi + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("identical states on a complete graph give identical joint states") {
  TopologySpec spec;
  spec.kind = Topology::kComplete;
  const auto g = build_graph(5, spec);
  const std::vector<double> v = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<std::vector<double>> states(5, v);
  for (std::size_t d = 0; d < 5; ++d) {
    const auto agg = aggregate_neighbors(g, states, d);
    const auto js = joint_state(v, agg);
    CHECK(js.local == v);
    CHECK(js.neighbor_agg == v);  // mean of identical copies
    CHECK(js.combined.size() == 10);
  }
}

TEST_CASE("joint state concatenates local then aggregate") {
  const auto js = joint_state({1.0, 2.0}, {3.0, 4.0});
  CHECK(js.combined == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(js.local == std::vector<double>{1.0, 2.0});
  CHECK(js.neighbor_agg == std::vector<double>{3.0, 4.0});
}

TEST_CASE("joint state rejects arity mismatches") {
  CHECK_THROWS_AS(joint_state({1.0, 2.0}, {3.0}), std::invalid_argument);
}

TEST_CASE("aggregation rejects mismatched state arities") {
  TopologySpec spec;
  spec.kind = Topology::kComplete;
  const auto g = build_graph(2, spec);
  std::vector<std::vector<double>> states = {{1.0, 2.0}, {1.0}};
  CHECK_THROWS_AS(aggregate_neighbors(g, states, 0), std::invalid_argument);
}
