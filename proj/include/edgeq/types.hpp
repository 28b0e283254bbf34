#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgeq {

// Scheduling decision a device takes for the task at the head of its queue.
// Integer encoding is part of the wire/checkpoint format and must not change.
enum class Action : int {
  kLocalProcess = 0,
  kEdgeOffload = 1,
  kDelay = 2,
};

inline constexpr int kNumActions = 3;

inline constexpr std::array<const char*, kNumActions> kActionNames = {
    "local_process", "edge_offload", "delay"};

inline Action action_from_index(int idx) {
  if (idx < 0 || idx >= kNumActions) {
    throw std::invalid_argument("action index out of range: " +
                                std::to_string(idx));
  }
  return static_cast<Action>(idx);
}

// One unit of work.
struct Task {
  std::int64_t id = 0;
  std::int64_t arrival_step = 0;
  double compute_demand = 1.0;  // compute units, > 0
  double data_size_kb = 0.0;    // >= 0
  std::optional<std::int64_t> deadline_steps;

  bool operator==(const Task&) const = default;
};

// Observable per-device features. `queue_length` is the raw count; the
// normalized feature vector is produced by to_vector() in the fixed order
// (load, battery, queue/queue_cap, network, occupancy).
struct DeviceState {
  double load_fraction = 0.0;       // head-task demand / max demand, in [0,1]
  double battery_fraction = 1.0;    // in [0,1]
  std::int64_t queue_length = 0;    // >= 0
  double network_quality = 1.0;     // in [0,1]
  double edge_occupancy_seen = 0.0; // in [0,1]

  std::vector<double> to_vector(double queue_cap) const {
    const double q =
        queue_cap > 0.0
            ? std::min(static_cast<double>(queue_length), queue_cap) / queue_cap
            : 0.0;
    return {load_fraction, battery_fraction, q, network_quality,
            edge_occupancy_seen};
  }

  static constexpr std::size_t kFeatureDim = 5;
};

// Weights of the per-step reward  r = -alpha*E - beta*D + gamma_u*U.
struct RewardWeights {
  double alpha = 0.01;    // per mWh
  double beta = 0.005;    // per ms
  double gamma_u = 0.25;  // per utilization unit
};

// -alpha*E - beta*D + gamma_u*U, evaluated in exactly this order.
double compute_reward(double energy_mwh, double delay_ms, double utilization,
                      const RewardWeights& w);

// Per-step result of advancing the environment.
struct StepOutcome {
  std::vector<double> energy_mwh;  // per device
  std::vector<double> delay_ms;    // per device
  std::vector<double> reward;      // per device
  double edge_utilization = 0.0;   // global, in [0,1]
  // Delays of tasks that finished this step (local completions and edge
  // completions), used for the per-completed-task delay metric.
  std::vector<double> completed_task_delays_ms;
};

}  // namespace edgeq
