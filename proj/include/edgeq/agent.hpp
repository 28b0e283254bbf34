#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "edgeq/env.hpp"
#include "edgeq/graph.hpp"
#include "edgeq/net.hpp"
#include "edgeq/policy.hpp"
#include "edgeq/replay.hpp"
#include "edgeq/rng.hpp"

namespace edgeq {

struct AgentHyperparams {
  std::vector<std::size_t> hidden_layers = {64, 64};
  double learning_rate = 1e-3;
  double discount = 0.9;
  double epsilon_start = 1.0;
  double epsilon_min = 0.05;
  double epsilon_decay = 0.995;  // multiplicative, applied per episode
  std::size_t batch_size = 32;
  std::size_t target_sync_interval = 250;  // environment steps
  std::size_t replay_capacity = 10000;
};

// Index of the largest Q value; ties break toward the lowest action index.
Action argmax_action(std::span<const double> q_values);

// Epsilon-greedy over the given Q values. With probability epsilon an action
// is drawn uniformly from the agent's stream; otherwise no randomness is
// consumed and the greedy action is returned.
Action select_action(std::span<const double> q_values, double epsilon, Rng& rng);

// One-step bootstrapped target: r + discount * max(next_q), or just r on
// terminal transitions.
double bellman_target(double reward, double discount,
                      std::span<const double> next_q_values, bool terminal);

struct LossGrad {
  double loss = 0.0;
  Gradient grad;
};

// Mean squared TD error over the batch and its gradient w.r.t. the online
// network only; targets come from the target network and are treated as
// constants.
LossGrad td_loss_and_gradient(const QNetwork& net, const QNetwork& target,
                              std::span<const Transition* const> batch,
                              double discount);

void sync_target(const QNetwork& net, QNetwork& target);

struct EpisodeStats {
  std::size_t episode = 0;
  double mean_loss = 0.0;      // mean over this episode's updates, 0 if none
  double total_reward = 0.0;   // summed over devices and steps
  double energy_mwh = 0.0;     // fleet total
  double avg_delay_ms = 0.0;   // mean over tasks completed this episode
  double utilization = 0.0;    // mean edge utilization over steps
  double epsilon = 0.0;        // value used during this episode
  std::size_t updates = 0;
};

struct TrainResult {
  QNetwork net;
  std::vector<EpisodeStats> log;
};

// Builds a fresh environment for the given episode; every source of
// randomness inside must derive from episode_seed.
using EnvFactory = std::function<std::unique_ptr<Env>(std::uint64_t episode_seed)>;

struct TrainOptions {
  std::size_t episodes = 300;
  std::uint64_t seed = 0;
  AggregationKind aggregation = AggregationKind::kMean;
  std::size_t aggregation_stride = 1;  // recompute neighbor aggregates every k steps
};

// Trains one shared Q-network across all devices. Each device contributes a
// transition per step; one SGD update runs per environment step once the
// replay buffer holds a full batch.
TrainResult train(const EnvFactory& make_env, const CollabGraph& graph,
                  const AgentHyperparams& hp, const TrainOptions& opts);

// Greedy wrapper over a trained network for evaluation.
class GreedyQPolicy final : public Policy {
 public:
  explicit GreedyQPolicy(const QNetwork* net) : net_(net) {}
  Action decide(std::size_t, const JointState& state) override;

 private:
  const QNetwork* net_;
};

// Joint observations for every device, honoring the aggregation stride:
// neighbor aggregates are recomputed only on steps where
// step_index % stride == 0 and reused (per device) in between.
class JointObserver {
 public:
  JointObserver(const CollabGraph* graph, AggregationKind kind, std::size_t stride);
  std::vector<JointState> observe_all(const Env& env, std::int64_t step_index);

 private:
  const CollabGraph* graph_;
  AggregationKind kind_;
  std::size_t stride_;
  std::vector<std::vector<double>> cached_agg_;
};

}  // namespace edgeq
