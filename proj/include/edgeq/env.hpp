#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <vector>

#include "edgeq/rng.hpp"
#include "edgeq/types.hpp"
#include "edgeq/workload.hpp"

namespace edgeq {

// Tunable constants of the discrete-time device/edge model.
struct EnvConfig {
  std::size_t n_devices = 8;
  std::size_t n_edge_nodes = 2;

  // Edge service. Each node serves up to `node_capacity_units` compute units
  // per step at full efficiency; once its backlog exceeds
  // `congestion_knee * capacity`, efficiency falls off linearly at
  // `congestion_slope` per unit of backlog/capacity ratio, down to
  // `efficiency_floor`. An overloaded node therefore wastes capacity, which
  // is what makes blind full offloading saturate.
  double node_capacity_units = 5.0;
  double congestion_knee = 2.0;
  double congestion_slope = 0.05;
  double efficiency_floor = 0.4;

  // Device energy (mWh). Idle is charged every step; local processing adds
  // cpu energy per compute unit, offloading adds transmit energy per KB,
  // deferring adds nothing beyond idle.
  double idle_energy_mwh = 0.5;
  double cpu_energy_mwh_per_unit = 1.0;
  double tx_energy_mwh_per_kb = 0.02;

  // Latency (ms). Local service is compute/local_speed. An offloaded task is
  // quoted data/bandwidth*(2-network_quality) transmit time, plus the node
  // backlog ahead of it at nominal speed, plus its own compute/edge_speed.
  double local_speed_units_per_ms = 0.08;
  double edge_speed_units_per_ms = 1.0;
  double bandwidth_kb_per_ms = 5.0;

  // Latency charge per step a queued task is explicitly deferred. Kept small
  // enough that holding heavy work back stays competitive with grinding it
  // locally, so deferral is a tactical choice rather than a dead action.
  double delay_penalty_ms = 40.0;

  double battery_capacity_mwh = 5000.0;

  // Feature normalization.
  double queue_norm_cap = 20.0;
  double compute_demand_max = 5.0;

  // Per-device link quality, drawn once per episode from this range.
  double network_quality_min = 0.3;
  double network_quality_max = 1.0;

  RewardWeights reward;
};

// Snapshot of one edge node after the most recent step.
struct EdgeNodeState {
  double capacity = 0.0;     // compute units per step
  double busy_units = 0.0;   // units actually served last step
  std::size_t queue_len = 0; // pending offloaded tasks

  double utilization() const { return capacity > 0.0 ? busy_units / capacity : 0.0; }
};

// Abstract episodic environment the trainer and evaluator run against.
class Env {
 public:
  virtual ~Env() = default;
  virtual std::size_t n_devices() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::int64_t horizon() const = 0;
  virtual bool terminal() const = 0;
  virtual std::vector<double> observe_vector(std::size_t device) const = 0;
  virtual StepOutcome step(std::span<const Action> actions) = 0;
  // Hash of the workload this episode runs on; 0 when not applicable.
  virtual std::uint64_t content_hash() const { return 0; }
};

// The device/edge simulation proper.
//
// Step order: (1) tasks whose arrival_step equals the current step join their
// device queues; (2) devices apply their actions to their queue heads in
// device-index order; (3) edge nodes serve backlog FIFO, possibly degraded by
// congestion; (4) rewards, batteries and the terminal flag are settled.
// Deterministic given (config, trace, seed).
class EdgeEnv final : public Env {
 public:
  EdgeEnv(EnvConfig cfg, Trace trace, std::uint64_t seed);

  std::size_t n_devices() const override { return cfg_.n_devices; }
  std::size_t state_dim() const override { return DeviceState::kFeatureDim; }
  std::int64_t horizon() const override { return trace_.horizon_steps; }
  bool terminal() const override { return terminal_; }
  std::vector<double> observe_vector(std::size_t device) const override;
  StepOutcome step(std::span<const Action> actions) override;
  std::uint64_t content_hash() const override;

  // Typed observation; pure.
  DeviceState observe(std::size_t device) const;

  std::int64_t step_index() const { return step_; }
  double total_energy_mwh() const { return total_energy_mwh_; }
  double device_battery_mwh(std::size_t device) const;
  EdgeNodeState node_state(std::size_t node) const;
  std::size_t node_of_device(std::size_t device) const;
  const EnvConfig& config() const { return cfg_; }
  const Trace& trace() const { return trace_; }

 private:
  struct QueuedTask {
    Task task;
    std::int64_t deferrals = 0;
  };
  struct EdgeJob {
    double remaining_units = 0.0;
    double metric_delay_ms = 0.0;  // recorded when the job finishes
  };
  struct Node {
    std::deque<EdgeJob> jobs;
    double backlog_units = 0.0;
    double last_busy_units = 0.0;
  };

  double occupancy_seen(std::size_t node) const;
  void admit_arrivals();

  EnvConfig cfg_;
  Trace trace_;
  std::vector<std::deque<QueuedTask>> queues_;
  std::vector<std::size_t> next_arrival_;  // per-device cursor into the trace
  std::vector<double> battery_mwh_;
  std::vector<double> network_quality_;
  std::vector<Node> nodes_;
  std::int64_t step_ = 0;
  bool terminal_ = false;
  double total_energy_mwh_ = 0.0;
};

}  // namespace edgeq
