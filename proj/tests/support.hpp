#pragma once

// Shared helpers for the test binaries: temp directories, hand-built traces,
// a tiny chain MDP with an exact value-iteration oracle, and an independent
// straight-line MLP forward used to cross-check QNetwork.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "edgeq/env.hpp"
#include "edgeq/net.hpp"
#include "edgeq/types.hpp"
#include "edgeq/workload.hpp"

namespace edgeq::testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("edgeq_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Trace with one device and the given tasks (ids auto-assigned).
inline Trace single_device_trace(std::vector<Task> tasks, std::int64_t horizon) {
  for (std::size_t i = 0; i < tasks.size(); ++i) tasks[i].id = static_cast<std::int64_t>(i);
  Trace t;
  t.horizon_steps = horizon;
  t.tasks.push_back(std::move(tasks));
  return t;
}

inline Trace empty_trace(std::size_t n_devices, std::int64_t horizon) {
  Trace t;
  t.horizon_steps = horizon;
  t.tasks.resize(n_devices);
  return t;
}

// Independent MLP forward: ReLU hidden layers, linear output, row-major
// weights. Written without reusing any QNetwork code paths.
inline std::vector<double> naive_forward(const QNetwork& net, std::span<const double> x) {
  std::vector<double> cur(x.begin(), x.end());
  const auto& layers = net.layers();
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const auto& L = layers[li];
    std::vector<double> nxt(L.out, 0.0);
    for (std::size_t o = 0; o < L.out; ++o) {
      double acc = L.b[o];
      for (std::size_t i = 0; i < L.in; ++i) acc += L.w[o * L.in + i] * cur[i];
      nxt[o] = (li + 1 < layers.size() && acc < 0.0) ? 0.0 : acc;
    }
    cur = std::move(nxt);
  }
  return cur;
}

// Deterministic chain MDP: states 0..n-1, observed one-hot, single device.
// Action 0 advances one state (small cost) and self-loops at the goal for a
// positive reward; action 1 jumps straight to the goal at a price; action 2
// waits for nothing. Episodes cut at the horizon. The induced discounted MDP
// has a known optimal policy, solvable exactly by value iteration.
class ChainEnv final : public Env {
 public:
  static constexpr double kStepCost = -0.01;
  static constexpr double kGoalReward = 0.2;
  static constexpr double kJumpCost = -0.1;

  ChainEnv(std::size_t n_states, std::int64_t horizon, std::size_t start_state = 0)
      : n_states_(n_states), horizon_(horizon), state_(start_state % n_states) {}

  std::size_t n_devices() const override { return 1; }
  std::size_t state_dim() const override { return n_states_; }
  std::int64_t horizon() const override { return horizon_; }
  bool terminal() const override { return step_ >= horizon_; }

  std::vector<double> observe_vector(std::size_t) const override {
    std::vector<double> v(n_states_, 0.0);
    v[state_] = 1.0;
    return v;
  }

  StepOutcome step(std::span<const Action> actions) override {
    double r = 0.0;
    switch (actions[0]) {
      case Action::kLocalProcess:
        if (state_ + 1 < n_states_) {
          r = kStepCost;
          ++state_;
        } else {
          r = kGoalReward;
        }
        break;
      case Action::kEdgeOffload:
        r = kJumpCost;
        state_ = n_states_ - 1;
        break;
      case Action::kDelay:
        break;
    }
    ++step_;
    StepOutcome out;
    out.energy_mwh = {0.0};
    out.delay_ms = {0.0};
    out.reward = {r};
    return out;
  }

  std::size_t state() const { return state_; }

 private:
  std::size_t n_states_;
  std::int64_t horizon_;
  std::size_t state_;
  std::int64_t step_ = 0;
};

// Exact Q table for ChainEnv's induced infinite-horizon MDP. Straight value
// iteration on the analytic transition model, run far past the requested
// tolerance.
inline std::vector<std::vector<double>> chain_q_oracle(std::size_t n, double discount,
                                                       double tol = 1e-10) {
  std::vector<double> v(n, 0.0);
  for (int iter = 0; iter < 1000000; ++iter) {
    std::vector<double> next(n, 0.0);
    double delta = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const bool at_goal = s + 1 == n;
      const double q_advance = at_goal ? ChainEnv::kGoalReward + discount * v[s]
                                       : ChainEnv::kStepCost + discount * v[s + 1];
      const double q_jump = ChainEnv::kJumpCost + discount * v[n - 1];
      const double q_wait = discount * v[s];
      next[s] = std::max({q_advance, q_jump, q_wait});
      delta = std::max(delta, std::abs(next[s] - v[s]));
    }
    v = std::move(next);
    if (delta < tol * 1e-2) break;
  }
  std::vector<std::vector<double>> q(n, std::vector<double>(3, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    const bool at_goal = s + 1 == n;
    q[s][0] = at_goal ? ChainEnv::kGoalReward + discount * v[s]
                      : ChainEnv::kStepCost + discount * v[s + 1];
    q[s][1] = ChainEnv::kJumpCost + discount * v[n - 1];
    q[s][2] = discount * v[s];
  }
  return q;
}

inline int oracle_argmax(const std::vector<double>& q) {
  return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

// Deterministic tabular MDP given by per-(state, action) successor and reward
// tables. Observed one-hot, single device, episodes cut at the horizon.
struct MdpTable {
  std::vector<std::array<std::size_t, 3>> next;
  std::vector<std::array<double, 3>> reward;

  std::size_t n_states() const { return next.size(); }
};

// Four-state dispatch loop. From the dispatch state the agent picks the
// profitable lane; each lane ends at a return state that feeds back to
// dispatch. Both lanes share their successor, so every action gap is a pure
// reward gap and survives horizon truncation at any depth.
inline MdpTable dispatch_loop_mdp() {
  MdpTable m;
  m.next = {
      {1, 2, 0},  // dispatch: advance -> good lane, jump -> bad lane, wait stays
      {3, 3, 3},  // good lane: everything proceeds to the return state
      {3, 3, 3},  // bad lane: likewise
      {0, 0, 0},  // return: everything feeds back to dispatch
  };
  m.reward = {
      {0.05, 0.00, -0.05},
      {0.50, 0.20, 0.35},
      {-0.10, 0.10, -0.30},
      {-0.15, -0.25, 0.00},
  };
  return m;
}

class TableEnv final : public Env {
 public:
  TableEnv(MdpTable table, std::int64_t horizon, std::size_t start_state = 0)
      : table_(std::move(table)), horizon_(horizon), state_(start_state % table_.n_states()) {}

  std::size_t n_devices() const override { return 1; }
  std::size_t state_dim() const override { return table_.n_states(); }
  std::int64_t horizon() const override { return horizon_; }
  bool terminal() const override { return step_ >= horizon_; }

  std::vector<double> observe_vector(std::size_t) const override {
    std::vector<double> v(table_.n_states(), 0.0);
    v[state_] = 1.0;
    return v;
  }

  StepOutcome step(std::span<const Action> actions) override {
    const auto a = static_cast<std::size_t>(actions[0]);
    const double r = table_.reward[state_][a];
    state_ = table_.next[state_][a];
    ++step_;
    StepOutcome out;
    out.energy_mwh = {0.0};
    out.delay_ms = {0.0};
    out.reward = {r};
    return out;
  }

  std::size_t state() const { return state_; }

 private:
  MdpTable table_;
  std::int64_t horizon_;
  std::size_t state_;
  std::int64_t step_ = 0;
};

// Exact Q table for an MdpTable under infinite-horizon discounting; plain
// value iteration run far past the requested tolerance.
inline std::vector<std::vector<double>> table_q_oracle(const MdpTable& m, double discount,
                                                       double tol = 1e-10) {
  const std::size_t n = m.n_states();
  std::vector<double> v(n, 0.0);
  for (int iter = 0; iter < 1000000; ++iter) {
    std::vector<double> next(n, 0.0);
    double delta = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double best = -1e300;
      for (std::size_t a = 0; a < 3; ++a) {
        best = std::max(best, m.reward[s][a] + discount * v[m.next[s][a]]);
      }
      next[s] = best;
      delta = std::max(delta, std::abs(best - v[s]));
    }
    v = std::move(next);
    if (delta < tol * 1e-2) break;
  }
  std::vector<std::vector<double>> q(n, std::vector<double>(3, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < 3; ++a) {
      q[s][a] = m.reward[s][a] + discount * v[m.next[s][a]];
    }
  }
  return q;
}

}  // namespace edgeq::testutil
