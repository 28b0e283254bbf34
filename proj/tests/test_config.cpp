#include <algorithm>
#include <fstream>
#include <string>

#include "doctest.h"
#include "edgeq/config.hpp"
#include "support.hpp"

using namespace edgeq;
using namespace edgeq::testutil;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
  return std::any_of(e.violations().begin(), e.violations().end(),
                     [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

ConfigError capture(const std::string& json_text) {
  try {
    (void)parse_config(json_text);
  } catch (const ConfigError& e) {
    return e;
  }
  throw std::runtime_error("expected ConfigError");
}

}  // namespace

TEST_CASE("empty object yields the default configuration") {
  const auto cfg = parse_config("{}");
  CHECK(cfg.n_devices == 8);
  CHECK(cfg.env.n_edge_nodes == 2);
  CHECK(cfg.env.n_devices == 8);  // kept in sync with the top-level count
  CHECK(cfg.topology.kind == Topology::kEdgeCluster);
  CHECK(cfg.topology.cluster_count == 2);  // resolved to the edge node count
  CHECK(cfg.aggregation == AggregationKind::kMean);
  CHECK(cfg.aggregation_stride == 1);
  CHECK(cfg.strategies == kStrategyOrder);
  CHECK(cfg.load_tier == LoadTier::kMedium);
  CHECK_FALSE(cfg.trace_path.has_value());
  CHECK(cfg.horizon_steps == 200);
  CHECK(cfg.train_episodes == 300);
  CHECK(cfg.eval_episodes == 3);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(cfg.out_dir == "results");
  CHECK(cfg.agent.hidden_layers == std::vector<std::size_t>{64, 64});
  CHECK(cfg.agent.batch_size == 32);
  CHECK(cfg.env.reward.alpha == 0.01);
  CHECK(validate(cfg).empty());
}

TEST_CASE("defaults are internally consistent") {
  CHECK(validate(ExperimentConfig{}).empty());
}

TEST_CASE("top-level fields parse") {
  const auto cfg = parse_config(R"({
    "n_devices": 4,
    "n_edge_nodes": 3,
    "topology": "ring",
    "aggregation": "max",
    "aggregation_stride": 5,
    "strategy": "dqn",
    "load_tier": "high",
    "horizon": 50,
    "episodes": 10,
    "eval_episodes": 2,
    "seeds": 3,
    "out_dir": "outdir"
  })");
  CHECK(cfg.n_devices == 4);
  CHECK(cfg.env.n_edge_nodes == 3);
  CHECK(cfg.env.n_devices == 4);
  CHECK(cfg.topology.kind == Topology::kRing);
  CHECK(cfg.aggregation == AggregationKind::kMax);
  CHECK(cfg.aggregation_stride == 5);
  CHECK(cfg.strategies == std::vector<Strategy>{Strategy::kDqn});
  CHECK(cfg.load_tier == LoadTier::kHigh);
  CHECK(cfg.horizon_steps == 50);
  CHECK(cfg.train_episodes == 10);
  CHECK(cfg.eval_episodes == 2);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(cfg.out_dir == "outdir");
}

TEST_CASE("strategy accepts an array and seeds accept a list") {
  const auto cfg = parse_config(R"({
    "strategy": ["local", "dqn"],
    "seeds": [7, 3, 11]
  })");
  CHECK(cfg.strategies == std::vector<Strategy>{Strategy::kLocalOnly, Strategy::kDqn});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{7, 3, 11});
}

TEST_CASE("topology object form with explicit edges") {
  const auto cfg = parse_config(R"({
    "n_devices": 3,
    "topology": {"kind": "explicit", "edges": [[0, 1], [1, 2]]}
  })");
  CHECK(cfg.topology.kind == Topology::kExplicit);
  REQUIRE(cfg.topology.edges.size() == 2);
  CHECK(cfg.topology.edges[0] == std::pair<std::size_t, std::size_t>{0, 1});

  const auto clustered = parse_config(R"({
    "topology": {"kind": "edge_cluster", "clusters": 4}
  })");
  CHECK(clustered.topology.cluster_count == 4);
}

TEST_CASE("nested sections parse") {
  const auto cfg = parse_config(R"({
    "reward_weights": {"alpha": 0.02, "beta": 0.01, "gamma_u": 0.5},
    "agent": {"hidden_layers": [16, 8], "learning_rate": 0.01, "batch_size": 4},
    "env": {"node_capacity_units": 9.5, "battery_capacity_mwh": 100.0},
    "tier_rates": {"low": 0.1, "medium": 0.3, "high": 0.7},
    "task_sizes": {"compute_min": 2, "compute_max": 3, "data_min_kb": 5, "data_max_kb": 6}
  })");
  CHECK(cfg.env.reward.alpha == 0.02);
  CHECK(cfg.env.reward.beta == 0.01);
  CHECK(cfg.env.reward.gamma_u == 0.5);
  CHECK(cfg.agent.hidden_layers == std::vector<std::size_t>{16, 8});
  CHECK(cfg.agent.learning_rate == 0.01);
  CHECK(cfg.agent.batch_size == 4);
  CHECK(cfg.env.node_capacity_units == 9.5);
  CHECK(cfg.env.battery_capacity_mwh == 100.0);
  CHECK(cfg.tier_rates.medium == 0.3);
  CHECK(cfg.task_sizes.compute_max == 3);
}

TEST_CASE("malformed JSON is a configuration error") {
  const auto e = capture("{ nope");
  CHECK(mentions(e, "not valid JSON"));
  CHECK(mentions(capture("[1, 2]"), "top level must be a JSON object"));
}

TEST_CASE("unknown keys are rejected with their full path") {
  CHECK(mentions(capture(R"({"n_device": 4})"), "config.n_device"));
  CHECK(mentions(capture(R"({"env": {"idle": 1}})"), "config.env.idle"));
  CHECK(mentions(capture(R"({"agent": {"lr": 0.1}})"), "config.agent.lr"));
  CHECK(mentions(capture(R"({"reward_weights": {"delta": 1}})"),
                 "config.reward_weights.delta"));
  CHECK(mentions(capture(R"({"tier_rates": {"extreme": 2}})"),
                 "config.tier_rates.extreme"));
  CHECK(mentions(capture(R"({"task_sizes": {"weight": 2}})"), "config.task_sizes.weight"));
}

TEST_CASE("type mismatches are rejected") {
  CHECK(mentions(capture(R"({"n_devices": "eight"})"), "config.n_devices"));
  CHECK(mentions(capture(R"({"n_devices": 2.5})"), "expected an integer"));
  CHECK(mentions(capture(R"({"n_devices": -3})"), "non-negative"));
  CHECK(mentions(capture(R"({"out_dir": 7})"), "expected a string"));
  CHECK(mentions(capture(R"({"agent": {"hidden_layers": [0]}})"),
                 "layer widths must be integers >= 1"));
  CHECK(mentions(capture(R"({"agent": 3})"), "expected an object"));
  CHECK(mentions(capture(R"({"topology": {"clusters": 2}})"), "config.topology.kind"));
  CHECK(mentions(capture(R"({"topology": {"kind": "explicit", "edges": [[0]]}})"),
                 "pair of device indices"));
  CHECK(mentions(capture(R"({"strategy": 4})"), "strategy name"));
  CHECK(mentions(capture(R"({"seeds": [1, -2]})"), "non-negative"));
  CHECK(mentions(capture(R"({"seeds": 0})"), "seed count must be >= 1"));
}

TEST_CASE("range violations are rejected") {
  CHECK(mentions(capture(R"({"n_devices": 0})"), "config.n_devices"));
  CHECK(mentions(capture(R"({"horizon": 0})"), "config.horizon"));
  CHECK(mentions(capture(R"({"episodes": 0})"), "config.episodes"));
  CHECK(mentions(capture(R"({"agent": {"learning_rate": 0}})"),
                 "config.agent.learning_rate"));
  CHECK(mentions(capture(R"({"agent": {"discount": 1.0}})"), "config.agent.discount"));
  CHECK(mentions(capture(R"({"agent": {"epsilon_start": 1.5}})"),
                 "config.agent.epsilon_start"));
  CHECK(mentions(capture(R"({"agent": {"batch_size": 64, "replay_capacity": 32}})"),
                 "config.agent.replay_capacity"));
  CHECK(mentions(capture(R"({"env": {"efficiency_floor": 0}})"),
                 "config.env.efficiency_floor"));
  CHECK(mentions(capture(R"({"env": {"bandwidth_kb_per_ms": -1}})"),
                 "config.env.bandwidth_kb_per_ms"));
  CHECK(mentions(capture(R"({"reward_weights": {"alpha": -0.5}})"),
                 "config.reward_weights.alpha"));
  CHECK(mentions(capture(R"({"strategy": ["local", "local"]})"), "duplicate strategy"));
  CHECK(mentions(capture(R"({"load_tier": "ultra"})"), "config.load_tier"));
  CHECK(mentions(capture(R"({"trace_path": "/definitely/not/here.csv"})"),
                 "does not exist"));
  CHECK(mentions(capture(R"({"topology": {"kind": "explicit", "edges": [[0, 9]]}})"),
                 "out of range"));
  CHECK(mentions(capture(R"({"topology": {"kind": "explicit", "edges": [[1, 1]]}})"),
                 "self-loop"));
}

TEST_CASE("all violations are reported together") {
  const auto e = capture(R"({
    "n_devices": 0,
    "horizon": -5,
    "bogus": true,
    "agent": {"learning_rate": -1, "mystery": 2},
    "env": {"battery_capacity_mwh": 0}
  })");
  CHECK(e.violations().size() >= 5);
  CHECK(mentions(e, "config.n_devices"));
  CHECK(mentions(e, "config.horizon"));
  CHECK(mentions(e, "config.bogus"));
  CHECK(mentions(e, "config.agent.learning_rate"));
  CHECK(mentions(e, "config.agent.mystery"));
  CHECK(mentions(e, "config.env.battery_capacity_mwh"));
  // what() carries every violation for plain-text consumers.
  CHECK(std::string(e.what()).find("config.bogus") != std::string::npos);
}

TEST_CASE("trace_path accepts an existing file") {
  TempDir dir("cfg_trace");
  const auto trace = generate_trace(2, LoadTier::kLow, 20, 1);
  const auto path = dir.path() / "trace.csv";
  write_trace(trace, path);
  const std::string text =
      std::string(R"({"n_devices": 2, "trace_path": ")") + path.string() + "\"}";
  const auto cfg = parse_config(text);
  REQUIRE(cfg.trace_path.has_value());
  CHECK(*cfg.trace_path == path.string());
}

TEST_CASE("load_config reads a file and rejects a missing one") {
  TempDir dir("cfg_file");
  const auto path = dir.path() / "cfg.json";
  {
    std::ofstream out(path);
    out << R"({"n_devices": 5})";
  }
  const auto cfg = load_config(path);
  CHECK(cfg.n_devices == 5);
  CHECK_THROWS_AS(load_config(dir.path() / "absent.json"), ConfigError);
}

TEST_CASE("cluster count defaults to the edge node count") {
  const auto cfg = parse_config(R"({
    "n_edge_nodes": 3,
    "topology": {"kind": "edge_cluster"}
  })");
  CHECK(cfg.topology.cluster_count == 3);  // follows the edge node count
}
