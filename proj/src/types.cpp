#include "edgeq/types.hpp"

#include <cmath>

namespace edgeq {

double compute_reward(double energy_mwh, double delay_ms, double utilization,
                      const RewardWeights& w) {
  // NaN fails all of these comparisons, so it is rejected too.
  if (!(energy_mwh >= 0.0) || !std::isfinite(energy_mwh)) {
    throw std::invalid_argument("compute_reward: energy must be finite and >= 0");
  }
  if (!(delay_ms >= 0.0) || !std::isfinite(delay_ms)) {
    throw std::invalid_argument("compute_reward: delay must be finite and >= 0");
  }
  if (!(utilization >= 0.0) || !(utilization <= 1.0)) {
    throw std::invalid_argument("compute_reward: utilization must be in [0,1]");
  }
  return -w.alpha * energy_mwh - w.beta * delay_ms + w.gamma_u * utilization;
}

}  // namespace edgeq
