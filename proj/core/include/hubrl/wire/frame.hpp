#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hubrl::wire {

// The robot link speaks headerless frames: a fixed number of IEEE-754
// float32 values, each big-endian, nothing else. Both sides know the frame
// sizes ahead of time, so framing is purely positional.
struct Frame {
  std::vector<std::uint8_t> payload;
  std::size_t count() const { return payload.size() / 4; }
};

// Encode float values into a big-endian frame.
// Throws NonFiniteValueError on NaN or infinity (a robot must never be
// handed one) — no bytes are produced in that case.
Frame encode_frame(std::span<const float> values);

// Decode a payload that must contain exactly `count` big-endian float32
// values. Throws LengthMismatchError otherwise. Bit-exact round-trip with
// encode_frame.
std::vector<float> decode_frame(std::span<const std::uint8_t> payload, std::size_t count);

}  // namespace hubrl::wire
