#include "hubrl/wire/frame.hpp"

#include <bit>
#include <cmath>

#include "hubrl/errors.hpp"

namespace hubrl::wire {

Frame encode_frame(std::span<const float> values) {
  for (float v : values)
    if (!std::isfinite(v)) throw NonFiniteValueError("refusing to encode non-finite value");
  Frame f;
  f.payload.resize(values.size() * 4);
  std::size_t o = 0;
  for (float v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    f.payload[o++] = static_cast<std::uint8_t>(bits >> 24);
    f.payload[o++] = static_cast<std::uint8_t>(bits >> 16);
    f.payload[o++] = static_cast<std::uint8_t>(bits >> 8);
    f.payload[o++] = static_cast<std::uint8_t>(bits);
  }
  return f;
}

std::vector<float> decode_frame(std::span<const std::uint8_t> payload, std::size_t count) {
  if (payload.size() != count * 4)
    throw LengthMismatchError("frame of " + std::to_string(payload.size()) +
                              " bytes cannot hold " + std::to_string(count) + " float32 values");
  std::vector<float> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits = (static_cast<std::uint32_t>(payload[4 * i]) << 24) |
                               (static_cast<std::uint32_t>(payload[4 * i + 1]) << 16) |
                               (static_cast<std::uint32_t>(payload[4 * i + 2]) << 8) |
                               static_cast<std::uint32_t>(payload[4 * i + 3]);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

}  // namespace hubrl::wire
