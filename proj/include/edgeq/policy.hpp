#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "edgeq/graph.hpp"
#include "edgeq/rng.hpp"
#include "edgeq/types.hpp"

namespace edgeq {

enum class Strategy { kLocalOnly, kEdgeOnly, kRandom, kRoundRobin, kDqn };

// Canonical report order.
extern const std::vector<Strategy> kStrategyOrder;

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

// A per-device decision rule. Stateful policies (random, round-robin) own
// their state; decide() is the only mutating entry point.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action decide(std::size_t device, const JointState& state) = 0;
};

class LocalOnlyPolicy final : public Policy {
 public:
  Action decide(std::size_t, const JointState&) override { return Action::kLocalProcess; }
};

class EdgeOnlyPolicy final : public Policy {
 public:
  Action decide(std::size_t, const JointState&) override { return Action::kEdgeOffload; }
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  Action decide(std::size_t, const JointState&) override;

 private:
  Rng rng_;
};

// Cycles local -> edge -> delay independently per device.
class RoundRobinPolicy final : public Policy {
 public:
  explicit RoundRobinPolicy(std::size_t n_devices) : next_(n_devices, 0) {}
  Action decide(std::size_t device, const JointState&) override;

 private:
  std::vector<int> next_;
};

// Baselines only; Strategy::kDqn needs a trained network (see agent.hpp).
std::unique_ptr<Policy> make_baseline(Strategy s, std::size_t n_devices, std::uint64_t seed);

}  // namespace edgeq
