#include "edgeq/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgeq {

namespace {

void check_config(const EnvConfig& cfg) {
  if (cfg.n_devices == 0) throw std::invalid_argument("env: n_devices must be >= 1");
  if (cfg.n_edge_nodes == 0) throw std::invalid_argument("env: n_edge_nodes must be >= 1");
  if (!(cfg.node_capacity_units > 0.0)) throw std::invalid_argument("env: node capacity must be > 0");
  if (!(cfg.local_speed_units_per_ms > 0.0) || !(cfg.edge_speed_units_per_ms > 0.0) ||
      !(cfg.bandwidth_kb_per_ms > 0.0)) {
    throw std::invalid_argument("env: speeds and bandwidth must be > 0");
  }
  if (!(cfg.battery_capacity_mwh > 0.0)) throw std::invalid_argument("env: battery capacity must be > 0");
  if (cfg.efficiency_floor <= 0.0 || cfg.efficiency_floor > 1.0) {
    throw std::invalid_argument("env: efficiency floor must be in (0,1]");
  }
}

}  // namespace

EdgeEnv::EdgeEnv(EnvConfig cfg, Trace trace, std::uint64_t seed)
    : cfg_(cfg), trace_(std::move(trace)) {
  check_config(cfg_);
  if (trace_.n_devices() > cfg_.n_devices) {
    throw std::invalid_argument("env: trace refers to more devices than configured");
  }
  trace_.tasks.resize(cfg_.n_devices);  // devices without arrivals stay idle
  if (trace_.horizon_steps < 1) {
    throw std::invalid_argument("env: trace horizon must be >= 1");
  }

  queues_.resize(cfg_.n_devices);
  next_arrival_.assign(cfg_.n_devices, 0);
  battery_mwh_.assign(cfg_.n_devices, cfg_.battery_capacity_mwh);
  nodes_.resize(cfg_.n_edge_nodes);
  network_quality_.resize(cfg_.n_devices);
  Rng rng(derive_seed(seed, 0x6e71));
  for (auto& q : network_quality_) {
    q = rng.uniform(cfg_.network_quality_min, cfg_.network_quality_max);
  }
  admit_arrivals();  // step-0 arrivals are visible to the first observe()
}

void EdgeEnv::admit_arrivals() {
  for (std::size_t d = 0; d < cfg_.n_devices; ++d) {
    const auto& list = trace_.tasks[d];
    auto& cursor = next_arrival_[d];
    while (cursor < list.size() && list[cursor].arrival_step <= step_) {
      queues_[d].push_back(QueuedTask{list[cursor], 0});
      ++cursor;
    }
  }
}

std::size_t EdgeEnv::node_of_device(std::size_t device) const {
  return device % cfg_.n_edge_nodes;
}

double EdgeEnv::occupancy_seen(std::size_t node) const {
  const double knee_units = cfg_.congestion_knee * cfg_.node_capacity_units;
  if (knee_units <= 0.0) return nodes_[node].backlog_units > 0.0 ? 1.0 : 0.0;
  return std::min(1.0, nodes_[node].backlog_units / knee_units);
}

DeviceState EdgeEnv::observe(std::size_t device) const {
  if (device >= cfg_.n_devices) {
    throw std::out_of_range("observe: device index out of range");
  }
  const auto& q = queues_[device];
  DeviceState s;
  s.load_fraction =
      q.empty() ? 0.0
                : std::clamp(q.front().task.compute_demand / cfg_.compute_demand_max, 0.0, 1.0);
  s.battery_fraction = std::clamp(battery_mwh_[device] / cfg_.battery_capacity_mwh, 0.0, 1.0);
  s.queue_length = static_cast<std::int64_t>(q.size());
  s.network_quality = network_quality_[device];
  s.edge_occupancy_seen = occupancy_seen(node_of_device(device));
  return s;
}

std::vector<double> EdgeEnv::observe_vector(std::size_t device) const {
  return observe(device).to_vector(cfg_.queue_norm_cap);
}

double EdgeEnv::device_battery_mwh(std::size_t device) const {
  if (device >= cfg_.n_devices) {
    throw std::out_of_range("device_battery_mwh: device index out of range");
  }
  return battery_mwh_[device];
}

EdgeNodeState EdgeEnv::node_state(std::size_t node) const {
  if (node >= cfg_.n_edge_nodes) {
    throw std::out_of_range("node_state: node index out of range");
  }
  return EdgeNodeState{cfg_.node_capacity_units, nodes_[node].last_busy_units,
                       nodes_[node].jobs.size()};
}

std::uint64_t EdgeEnv::content_hash() const { return trace_checksum(trace_); }

StepOutcome EdgeEnv::step(std::span<const Action> actions) {
  if (terminal_) throw std::logic_error("step: environment is terminal");
  if (actions.size() != cfg_.n_devices) {
    throw std::invalid_argument("step: need exactly one action per device");
  }

  const std::size_t n = cfg_.n_devices;
  StepOutcome out;
  out.energy_mwh.assign(n, 0.0);
  out.delay_ms.assign(n, 0.0);
  out.reward.assign(n, 0.0);

  // Devices act on their queue heads, in index order. An empty queue makes
  // any action a no-op that costs idle energy only.
  for (std::size_t i = 0; i < n; ++i) {
    double energy = cfg_.idle_energy_mwh;
    double delay = 0.0;
    auto& q = queues_[i];
    if (!q.empty()) {
      switch (actions[i]) {
        case Action::kLocalProcess: {
          const QueuedTask item = q.front();
          q.pop_front();
          energy += cfg_.cpu_energy_mwh_per_unit * item.task.compute_demand;
          const double service = item.task.compute_demand / cfg_.local_speed_units_per_ms;
          delay = service;
          out.completed_task_delays_ms.push_back(
              service + static_cast<double>(item.deferrals) * cfg_.delay_penalty_ms);
          break;
        }
        case Action::kEdgeOffload: {
          const QueuedTask item = q.front();
          q.pop_front();
          energy += cfg_.tx_energy_mwh_per_kb * item.task.data_size_kb;
          auto& node = nodes_[node_of_device(i)];
          const double tx = item.task.data_size_kb / cfg_.bandwidth_kb_per_ms *
                            (2.0 - network_quality_[i]);
          const double wait = node.backlog_units / cfg_.edge_speed_units_per_ms;
          const double service = item.task.compute_demand / cfg_.edge_speed_units_per_ms;
          delay = tx + wait + service;
          node.jobs.push_back(EdgeJob{
              item.task.compute_demand,
              delay + static_cast<double>(item.deferrals) * cfg_.delay_penalty_ms});
          node.backlog_units += item.task.compute_demand;
          break;
        }
        case Action::kDelay: {
          q.front().deferrals += 1;
          delay = cfg_.delay_penalty_ms;
          break;
        }
      }
    }
    out.energy_mwh[i] = energy;
    out.delay_ms[i] = delay;
  }

  // Edge nodes serve their FIFO backlog. Efficiency degrades once the
  // backlog/capacity ratio passes the knee, so a saturated node wastes
  // capacity instead of catching up.
  double served_total = 0.0;
  double capacity_total = 0.0;
  for (auto& node : nodes_) {
    capacity_total += cfg_.node_capacity_units;
    double serve = 0.0;
    if (node.backlog_units > 0.0) {
      const double ratio = node.backlog_units / cfg_.node_capacity_units;
      double efficiency = 1.0;
      if (ratio > cfg_.congestion_knee) {
        efficiency = std::max(cfg_.efficiency_floor,
                              1.0 - cfg_.congestion_slope * (ratio - cfg_.congestion_knee));
      }
      serve = std::min(node.backlog_units, efficiency * cfg_.node_capacity_units);
    }
    node.last_busy_units = serve;
    served_total += serve;
    double budget = serve;
    while (budget > 1e-12 && !node.jobs.empty()) {
      EdgeJob& job = node.jobs.front();
      const double take = std::min(job.remaining_units, budget);
      job.remaining_units -= take;
      budget -= take;
      if (job.remaining_units <= 1e-12) {
        out.completed_task_delays_ms.push_back(job.metric_delay_ms);
        node.jobs.pop_front();
      }
    }
    double backlog = 0.0;
    for (const EdgeJob& job : node.jobs) backlog += job.remaining_units;
    node.backlog_units = backlog;
  }
  out.edge_utilization =
      capacity_total > 0.0 ? std::clamp(served_total / capacity_total, 0.0, 1.0) : 0.0;

  bool battery_dead = false;
  for (std::size_t i = 0; i < n; ++i) {
    out.reward[i] =
        compute_reward(out.energy_mwh[i], out.delay_ms[i], out.edge_utilization, cfg_.reward);
    battery_mwh_[i] -= out.energy_mwh[i];
    total_energy_mwh_ += out.energy_mwh[i];
    if (battery_mwh_[i] <= 0.0) battery_dead = true;
  }

  ++step_;
  terminal_ = step_ >= trace_.horizon_steps || battery_dead;
  if (!terminal_) admit_arrivals();
  return out;
}

}  // namespace edgeq
