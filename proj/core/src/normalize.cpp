#include "hubrl/normalize.hpp"

#include <algorithm>

#include "hubrl/errors.hpp"

namespace hubrl {

double normalize_value(double v, double low, double high, NormalizeStats* stats) {
  const double out = 2.0 * (v - low) / (high - low) - 1.0;
  if (out < -1.0 || out > 1.0) {
    if (stats) ++stats->clamped;
    return std::clamp(out, -1.0, 1.0);
  }
  return out;
}

double denormalize_value(double v, double low, double high) {
  return (v + 1.0) * 0.5 * (high - low) + low;
}

std::vector<float> normalize(std::span<const double> values, const BoundedSpec& spec,
                             NormalizeStats* stats) {
  if (static_cast<int>(values.size()) != spec.size())
    throw ShapeMismatchError("normalize: value count does not match bounds");
  std::vector<float> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = static_cast<float>(normalize_value(values[i], spec.low(static_cast<int>(i)),
                                                spec.high(static_cast<int>(i)), stats));
  return out;
}

std::vector<double> denormalize(std::span<const float> values, const BoundedSpec& spec) {
  if (static_cast<int>(values.size()) != spec.size())
    throw ShapeMismatchError("denormalize: value count does not match bounds");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = denormalize_value(values[i], spec.low(static_cast<int>(i)),
                               spec.high(static_cast<int>(i)));
  return out;
}

}  // namespace hubrl
