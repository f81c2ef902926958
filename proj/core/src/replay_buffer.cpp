#include "hubrl/replay_buffer.hpp"

#include "hubrl/errors.hpp"

namespace hubrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ShapeMismatchError("replay buffer capacity must be positive");
  // reserve in slabs; a million-transition buffer fills gradually
  storage_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[write_pos_] = std::move(t);
  }
  write_pos_ = (write_pos_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, SeededRng& rng) const {
  if (storage_.size() < batch)
    throw UnderfilledBufferError("replay sample of " + std::to_string(batch) +
                                 " requested with only " + std::to_string(storage_.size()) +
                                 " stored");
  std::vector<const Transition*> out(batch);
  for (std::size_t i = 0; i < batch; ++i) out[i] = &storage_[rng.index(storage_.size())];
  return out;
}

}  // namespace hubrl
