#include "edgeq/embed.hpp"

#include <stdexcept>

#include "edgeq/rng.hpp"

namespace edgeq {

namespace {

// Pure per-(step, device, channel) noise in [0,1).
double noise01(std::uint64_t seed, std::uint64_t step, std::uint64_t device,
               std::uint64_t channel) {
  const std::uint64_t z =
      derive_seed(derive_seed(derive_seed(seed, step), device), channel);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

EmbeddedEnv::EmbeddedEnv(std::unique_ptr<Env> inner, std::size_t target_dim,
                         std::uint64_t noise_seed)
    : inner_(std::move(inner)), target_dim_(target_dim), noise_seed_(noise_seed) {
  if (inner_ == nullptr) throw std::invalid_argument("embedded env: null inner env");
  if (target_dim_ < kCoreDim) {
    throw std::invalid_argument("embedded env: target dimension must be >= 4");
  }
  if (inner_->state_dim() < kCoreDim) {
    throw std::invalid_argument("embedded env: inner env exposes fewer than 4 features");
  }
  for (std::size_t j = kCoreDim; j < target_dim_; ++j) {
    const std::size_t k = j - kCoreDim;
    if (k % 2 == 0) max_lag_ = std::max(max_lag_, 1 + (k / 2) / kCoreDim);
  }
  history_.resize(inner_->n_devices());
}

std::vector<double> EmbeddedEnv::observe_vector(std::size_t device) const {
  if (device >= inner_->n_devices()) {
    throw std::out_of_range("embedded env: device index out of range");
  }
  const std::vector<double> inner_v = inner_->observe_vector(device);
  std::vector<double> out(target_dim_, 0.0);
  for (std::size_t k = 0; k < kCoreDim; ++k) out[k] = inner_v[k];

  const auto& hist = history_[device];
  for (std::size_t j = kCoreDim; j < target_dim_; ++j) {
    const std::size_t k = j - kCoreDim;
    if (k % 2 == 0) {
      // Lagged copy of a core feature; lag grows every full cycle of 4.
      const std::size_t m = k / 2;
      const std::size_t lag = 1 + m / kCoreDim;
      const std::size_t feature = m % kCoreDim;
      out[j] = hist.size() >= lag ? hist[hist.size() - lag][feature] : 0.0;
    } else {
      out[j] = kNoiseAmplitude *
               noise01(noise_seed_, static_cast<std::uint64_t>(step_), device, j);
    }
  }
  return out;
}

StepOutcome EmbeddedEnv::step(std::span<const Action> actions) {
  // Snapshot the pre-step core features so lag channels reference history.
  if (max_lag_ > 0) {
    for (std::size_t d = 0; d < history_.size(); ++d) {
      std::vector<double> inner_v = inner_->observe_vector(d);
      inner_v.resize(kCoreDim);
      auto& hist = history_[d];
      hist.push_back(std::move(inner_v));
      if (hist.size() > max_lag_) hist.erase(hist.begin());
    }
  }
  StepOutcome out = inner_->step(actions);
  ++step_;
  return out;
}

}  // namespace edgeq
