#pragma once

#include <cstddef>
#include <vector>

#include "hubrl/rng.hpp"
#include "hubrl/types.hpp"

namespace hubrl {

// Uniform ring-buffer replay memory. Once capacity is reached, pushes
// overwrite the oldest entry. Sampling is iid uniform with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }

  // i-th entry in storage order (not insertion order once wrapped)
  const Transition& at(std::size_t i) const { return storage_[i]; }

  // Throws UnderfilledBufferError when fewer than `batch` entries are stored.
  std::vector<const Transition*> sample(std::size_t batch, SeededRng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t write_pos_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace hubrl
