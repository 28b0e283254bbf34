#include "edgeq/replay.hpp"

#include <stdexcept>

namespace edgeq {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay: capacity must be >= 1");
  ring_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[head_] = std::move(t);
  }
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t k) const {
  if (k >= size_) throw std::out_of_range("replay: index out of range");
  // Oldest element sits right after the write head once the ring is full.
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return ring_[(oldest + k) % capacity_];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0) throw std::invalid_argument("replay: batch size must be >= 1");
  if (size_ < batch_size) {
    throw std::logic_error("replay: buffer holds fewer transitions than the batch size");
  }
  std::vector<const Transition*> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto idx = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(size_) - 1));
    out.push_back(&ring_[(size_ < capacity_ ? idx : (head_ + idx) % capacity_)]);
  }
  return out;
}

}  // namespace edgeq
