#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "edgeq/env.hpp"

namespace edgeq {

// Re-expresses the four core device features (load, battery, queue, network)
// at an arbitrary per-device dimension for the state-size experiments.
//
// Layout for target dimension d:
//   [0..3]  the core features
//   [4..]   alternating redundant channels (lagged copies of the core
//           features, lag growing with the channel index) and bounded noise
//           channels that the learner has to ignore.
//
// Lag channels read from per-device history (zeros before the first step);
// noise is a pure function of (seed, step, device, channel) so observations
// stay side-effect free.
class EmbeddedEnv final : public Env {
 public:
  static constexpr double kNoiseAmplitude = 0.5;
  static constexpr std::size_t kCoreDim = 4;

  EmbeddedEnv(std::unique_ptr<Env> inner, std::size_t target_dim, std::uint64_t noise_seed);

  std::size_t n_devices() const override { return inner_->n_devices(); }
  std::size_t state_dim() const override { return target_dim_; }
  std::int64_t horizon() const override { return inner_->horizon(); }
  bool terminal() const override { return inner_->terminal(); }
  std::vector<double> observe_vector(std::size_t device) const override;
  StepOutcome step(std::span<const Action> actions) override;
  std::uint64_t content_hash() const override { return inner_->content_hash(); }

 private:
  std::unique_ptr<Env> inner_;
  std::size_t target_dim_;
  std::uint64_t noise_seed_;
  std::int64_t step_ = 0;
  std::size_t max_lag_ = 0;
  // history_[device] holds the most recent core vectors, newest last.
  std::vector<std::vector<std::vector<double>>> history_;
};

}  // namespace edgeq
