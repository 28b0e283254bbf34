#pragma once

#include <cstddef>
#include <vector>

#include "edgeq/rng.hpp"
#include "edgeq/types.hpp"

namespace edgeq {

struct Transition {
  std::vector<double> state;
  Action action = Action::kLocalProcess;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

// Fixed-capacity FIFO store with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  // k-th oldest transition currently stored, 0 = oldest.
  const Transition& at(std::size_t k) const;

  // Throws std::logic_error if fewer than batch_size transitions are stored.
  std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
};

}  // namespace edgeq
