#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgeq/agent.hpp"
#include "edgeq/env.hpp"
#include "edgeq/graph.hpp"
#include "edgeq/policy.hpp"
#include "edgeq/workload.hpp"

namespace edgeq {

// Thrown on invalid experiment configuration; collects every violation found
// rather than stopping at the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct ExperimentConfig {
  std::size_t n_devices = 8;
  TopologySpec topology;  // edge_cluster with 2 clusters by default
  AggregationKind aggregation = AggregationKind::kMean;
  std::size_t aggregation_stride = 1;
  std::vector<Strategy> strategies = {Strategy::kLocalOnly, Strategy::kEdgeOnly,
                                      Strategy::kRandom, Strategy::kRoundRobin,
                                      Strategy::kDqn};
  LoadTier load_tier = LoadTier::kMedium;
  std::optional<std::string> trace_path;  // fixed workload instead of generated
  std::int64_t horizon_steps = 200;
  std::size_t train_episodes = 300;
  std::size_t eval_episodes = 3;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::string out_dir = "results";
  EnvConfig env;
  AgentHyperparams agent;
  TierRates tier_rates;
  TaskSizeModel task_sizes;
};

// Returns every violation in a fresh default-constructed-and-modified config;
// empty means valid.
std::vector<std::string> validate(const ExperimentConfig& cfg);

// Parses and validates a JSON config file. Unknown keys, type mismatches and
// range violations are all reported together via ConfigError. Missing keys
// keep their defaults.
ExperimentConfig load_config(const std::filesystem::path& path);

// Parses a config from a JSON string (same rules as load_config).
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace edgeq
