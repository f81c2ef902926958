#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hubrl/errors.hpp"

namespace hubrl {

// Minimal dense float32 tensor, row-major.
struct Tensor {
  std::vector<int> shape;
  std::vector<float> data;

  Tensor() = default;
  Tensor(std::vector<int> s, std::vector<float> d) : shape(std::move(s)), data(std::move(d)) {
    if (numel() != static_cast<long>(data.size()))
      throw ShapeMismatchError("tensor data size does not match shape");
  }

  static Tensor zeros(std::vector<int> s) {
    long n = 1;
    for (int d : s) n *= d;
    return Tensor(std::move(s), std::vector<float>(static_cast<std::size_t>(n), 0.0f));
  }

  static Tensor vec(std::vector<float> d) {
    const int n = static_cast<int>(d.size());
    return Tensor({n}, std::move(d));
  }

  long numel() const {
    long n = 1;
    for (int d : shape) n *= d;
    return shape.empty() ? 0 : n;
  }

  // 2-D access (image tensors)
  float& at(int r, int c) { return data[static_cast<std::size_t>(r) * shape[1] + c]; }
  float at(int r, int c) const { return data[static_cast<std::size_t>(r) * shape[1] + c]; }
};

// Named observation channels. Every env provides "vec"; the camera env
// additionally provides "image" (64x64, values in [0,1]).
using ObservationMap = std::map<std::string, Tensor>;

inline const Tensor& obs_vec(const ObservationMap& m) { return m.at("vec"); }
inline bool obs_has_image(const ObservationMap& m) { return m.count("image") != 0; }

// Closed interval for one channel.
struct Bounds {
  double low = 0.0;
  double high = 0.0;
};

// Per-dimension bounds of a fixed-size vector quantity (raw observation
// channels, mapped command ranges, goal ranges, ...).
struct BoundedSpec {
  std::vector<Bounds> dims;

  BoundedSpec() = default;
  explicit BoundedSpec(std::vector<Bounds> d) : dims(std::move(d)) {}

  static BoundedSpec uniform(int n, double low, double high) {
    return BoundedSpec(std::vector<Bounds>(static_cast<std::size_t>(n), Bounds{low, high}));
  }

  int size() const { return static_cast<int>(dims.size()); }
  double low(int i) const { return dims[static_cast<std::size_t>(i)].low; }
  double high(int i) const { return dims[static_cast<std::size_t>(i)].high; }

  BoundedSpec& append(double low, double high) {
    dims.push_back(Bounds{low, high});
    return *this;
  }
};

// One environment step as stored for learning. `done` covers both terminal
// states and step-budget truncation; the pipeline does not distinguish them.
struct Transition {
  ObservationMap obs;
  std::vector<float> action;  // raw policy action in [-1, 1]
  float reward = 0.0f;
  ObservationMap next_obs;
  bool done = false;
};

}  // namespace hubrl
