#include "edgeq/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgeq {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::kRing: return "ring";
    case Topology::kStar: return "star";
    case Topology::kComplete: return "complete";
    case Topology::kEdgeCluster: return "edge_cluster";
    case Topology::kExplicit: return "explicit";
  }
  throw std::logic_error("unreachable topology");
}

Topology topology_from_string(const std::string& name) {
  if (name == "ring") return Topology::kRing;
  if (name == "star") return Topology::kStar;
  if (name == "complete") return Topology::kComplete;
  if (name == "edge_cluster") return Topology::kEdgeCluster;
  if (name == "explicit") return Topology::kExplicit;
  throw std::invalid_argument("unknown topology: '" + name +
                              "' (expected ring|star|complete|edge_cluster|explicit)");
}

std::string to_string(AggregationKind k) {
  switch (k) {
    case AggregationKind::kMean: return "mean";
    case AggregationKind::kMax: return "max";
  }
  throw std::logic_error("unreachable aggregation kind");
}

AggregationKind aggregation_from_string(const std::string& name) {
  if (name == "mean") return AggregationKind::kMean;
  if (name == "max") return AggregationKind::kMax;
  throw std::invalid_argument("unknown aggregation: '" + name + "' (expected mean|max)");
}

const std::vector<std::size_t>& CollabGraph::neighbors(std::size_t device) const {
  if (device >= n_devices) throw std::out_of_range("neighbors: device index out of range");
  return adjacency[device];
}

bool CollabGraph::has_edge(std::size_t a, std::size_t b) const {
  if (a >= n_devices || b >= n_devices) return false;
  const auto lo = std::min(a, b), hi = std::max(a, b);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(lo, hi));
}

CollabGraph build_graph(std::size_t n_devices, const TopologySpec& spec) {
  if (n_devices == 0) throw std::invalid_argument("build_graph: n_devices must be >= 1");

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  const auto add = [&edges](std::size_t a, std::size_t b) {
    if (a == b) return;
    edges.emplace_back(std::min(a, b), std::max(a, b));
  };

  switch (spec.kind) {
    case Topology::kRing:
      for (std::size_t i = 0; i + 1 < n_devices; ++i) add(i, i + 1);
      if (n_devices > 2) add(n_devices - 1, 0);
      break;
    case Topology::kStar:
      for (std::size_t i = 1; i < n_devices; ++i) add(0, i);
      break;
    case Topology::kComplete:
      for (std::size_t i = 0; i < n_devices; ++i)
        for (std::size_t j = i + 1; j < n_devices; ++j) add(i, j);
      break;
    case Topology::kEdgeCluster: {
      if (spec.cluster_count == 0) {
        throw std::invalid_argument("build_graph: edge_cluster needs cluster_count >= 1");
      }
      for (std::size_t i = 0; i < n_devices; ++i)
        for (std::size_t j = i + 1; j < n_devices; ++j)
          if (i % spec.cluster_count == j % spec.cluster_count) add(i, j);
      break;
    }
    case Topology::kExplicit:
      for (const auto& [a, b] : spec.edges) {
        if (a >= n_devices || b >= n_devices) {
          throw std::invalid_argument("build_graph: explicit edge (" + std::to_string(a) +
                                      "," + std::to_string(b) + ") out of range");
        }
        if (a == b) {
          throw std::invalid_argument("build_graph: self-loop on device " + std::to_string(a));
        }
        add(a, b);
      }
      break;
  }

  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  CollabGraph graph;
  graph.n_devices = n_devices;
  graph.edges = std::move(edges);
  graph.adjacency.assign(n_devices, {});
  for (const auto& [a, b] : graph.edges) {
    graph.adjacency[a].push_back(b);
    graph.adjacency[b].push_back(a);
  }
  for (auto& list : graph.adjacency) std::sort(list.begin(), list.end());
  return graph;
}

std::vector<double> aggregate_neighbors(const CollabGraph& graph,
                                        const std::vector<std::vector<double>>& states,
                                        std::size_t device, AggregationKind kind) {
  if (device >= graph.n_devices) {
    throw std::out_of_range("aggregate_neighbors: device index out of range");
  }
  if (states.size() != graph.n_devices) {
    throw std::invalid_argument("aggregate_neighbors: need one state per device");
  }
  const std::size_t dim = states[device].size();
  for (const auto& s : states) {
    if (s.size() != dim) {
      throw std::invalid_argument("aggregate_neighbors: state arity mismatch");
    }
  }

  std::vector<double> agg(dim, 0.0);
  const auto& nbrs = graph.adjacency[device];
  if (nbrs.empty()) return agg;  // isolated devices aggregate to zero

  if (kind == AggregationKind::kMean) {
    for (const std::size_t nb : nbrs) {
      const auto& s = states[nb];
      for (std::size_t k = 0; k < dim; ++k) agg[k] += s[k];
    }
    const double inv = 1.0 / static_cast<double>(nbrs.size());
    for (double& v : agg) v *= inv;
  } else {
    agg = states[nbrs.front()];
    for (std::size_t idx = 1; idx < nbrs.size(); ++idx) {
      const auto& s = states[nbrs[idx]];
      for (std::size_t k = 0; k < dim; ++k) agg[k] = std::max(agg[k], s[k]);
    }
  }
  return agg;
}

JointState joint_state(std::vector<double> local, std::vector<double> neighbor_agg) {
  if (local.size() != neighbor_agg.size()) {
    throw std::invalid_argument("joint_state: local and aggregate arities differ");
  }
  for (const double v : local) {
    if (!std::isfinite(v)) throw std::invalid_argument("joint_state: non-finite local entry");
  }
  for (const double v : neighbor_agg) {
    if (!std::isfinite(v)) throw std::invalid_argument("joint_state: non-finite aggregate entry");
  }
  JointState js;
  js.combined.reserve(2 * local.size());
  js.combined.insert(js.combined.end(), local.begin(), local.end());
  js.combined.insert(js.combined.end(), neighbor_agg.begin(), neighbor_agg.end());
  js.local = std::move(local);
  js.neighbor_agg = std::move(neighbor_agg);
  return js;
}

}  // namespace edgeq
