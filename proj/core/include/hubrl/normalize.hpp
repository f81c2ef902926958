#pragma once

#include <span>
#include <vector>

#include "hubrl/types.hpp"

namespace hubrl {

// Counts raw values that fell outside their declared bounds and had to be
// clamped during normalization. A nonzero count usually means a bounds table
// is wrong or a robot reported garbage; envs surface it in debug logs.
struct NormalizeStats {
  long clamped = 0;
};

// Map raw per-channel values into [-1, 1]:  out = 2*(v - low)/(high - low) - 1,
// clamped to [-1, 1]. Raw values are doubles (robot units); normalized
// observations are float32 (what the networks consume).
std::vector<float> normalize(std::span<const double> values, const BoundedSpec& spec,
                             NormalizeStats* stats = nullptr);

// Inverse map from [-1, 1] into [low, high] per channel. Used both to invert
// observations and to map policy actions onto motor command ranges.
std::vector<double> denormalize(std::span<const float> values, const BoundedSpec& spec);

double normalize_value(double v, double low, double high, NormalizeStats* stats = nullptr);
double denormalize_value(double v, double low, double high);

}  // namespace hubrl
