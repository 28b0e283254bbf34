#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace edgeq {

enum class Topology { kRing, kStar, kComplete, kEdgeCluster, kExplicit };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& name);

// How a device folds its neighbors' states into one vector.
enum class AggregationKind { kMean, kMax };

std::string to_string(AggregationKind k);
AggregationKind aggregation_from_string(const std::string& name);

struct TopologySpec {
  Topology kind = Topology::kEdgeCluster;
  // Number of clusters for kEdgeCluster (devices are assigned round-robin,
  // device i -> cluster i % k, mirroring the device -> edge-node mapping).
  // 0 means "match the number of edge nodes"; the harness resolves it before
  // calling build_graph, which requires a positive count.
  std::size_t cluster_count = 0;
  // Undirected edges for kExplicit, device indices.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// Undirected collaboration graph over device indices. Edges are stored
// normalized (lo < hi), deduplicated and sorted; self-loops are rejected.
struct CollabGraph {
  std::size_t n_devices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::vector<std::size_t>> adjacency;  // sorted neighbor lists

  const std::vector<std::size_t>& neighbors(std::size_t device) const;
  bool has_edge(std::size_t a, std::size_t b) const;
};

CollabGraph build_graph(std::size_t n_devices, const TopologySpec& spec);

// Element-wise mean (or max) of the neighbors' state vectors. A device with
// no neighbors aggregates to the zero vector. All states must share arity.
std::vector<double> aggregate_neighbors(const CollabGraph& graph,
                                        const std::vector<std::vector<double>>& states,
                                        std::size_t device,
                                        AggregationKind kind = AggregationKind::kMean);

// A device's own state concatenated with its neighbor aggregate.
struct JointState {
  std::vector<double> local;
  std::vector<double> neighbor_agg;
  std::vector<double> combined;  // local followed by neighbor_agg
};

JointState joint_state(std::vector<double> local, std::vector<double> neighbor_agg);

}  // namespace edgeq
