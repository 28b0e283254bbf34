#include "edgeq/policy.hpp"

#include <stdexcept>

namespace edgeq {

const std::vector<Strategy> kStrategyOrder = {
    Strategy::kLocalOnly, Strategy::kEdgeOnly, Strategy::kRandom,
    Strategy::kRoundRobin, Strategy::kDqn};

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kLocalOnly: return "local";
    case Strategy::kEdgeOnly: return "edge";
    case Strategy::kRandom: return "random";
    case Strategy::kRoundRobin: return "round_robin";
    case Strategy::kDqn: return "dqn";
  }
  throw std::logic_error("unreachable strategy");
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "local") return Strategy::kLocalOnly;
  if (name == "edge") return Strategy::kEdgeOnly;
  if (name == "random") return Strategy::kRandom;
  if (name == "round_robin") return Strategy::kRoundRobin;
  if (name == "dqn") return Strategy::kDqn;
  throw std::invalid_argument("unknown strategy: '" + name +
                              "' (expected local|edge|random|round_robin|dqn)");
}

Action RandomPolicy::decide(std::size_t, const JointState&) {
  return action_from_index(static_cast<int>(rng_.uniform_int(0, kNumActions - 1)));
}

Action RoundRobinPolicy::decide(std::size_t device, const JointState&) {
  if (device >= next_.size()) {
    throw std::out_of_range("round_robin: device index out of range");
  }
  const Action a = action_from_index(next_[device]);
  next_[device] = (next_[device] + 1) % kNumActions;
  return a;
}

std::unique_ptr<Policy> make_baseline(Strategy s, std::size_t n_devices, std::uint64_t seed) {
  switch (s) {
    case Strategy::kLocalOnly: return std::make_unique<LocalOnlyPolicy>();
    case Strategy::kEdgeOnly: return std::make_unique<EdgeOnlyPolicy>();
    case Strategy::kRandom: return std::make_unique<RandomPolicy>(seed);
    case Strategy::kRoundRobin: return std::make_unique<RoundRobinPolicy>(n_devices);
    case Strategy::kDqn:
      throw std::invalid_argument("make_baseline: dqn requires a trained network");
  }
  throw std::logic_error("unreachable strategy");
}

}  // namespace edgeq
