#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hubrl/wire/transport.hpp"

namespace hubrl::wire {

// The hub side of the protocol: a tiny request/response server that mirrors
// the firmware script running on a real robot. Each cycle it polls for an
// action frame, applies it to the robot (here: a dynamics callback), waits
// `step_delay_s` (the real robot moves during this time), and replies with
// one state frame. Strict alternation — one state frame per action frame,
// nothing unsolicited.
struct HubProgram {
  std::size_t action_dim = 0;
  std::size_t state_dim = 0;
  // mapped motor commands in, raw sensor state out
  std::function<std::vector<float>(std::span<const float>)> dynamics;
  double step_delay_s = 0.0;
};

// Runs the hub loop until the env side closes the transport; returns the
// number of exchanges served. Exits cleanly on disconnect (never throws for
// an orderly close).
long run_hub_program(const HubProgram& program, Transport& transport);

// One env-side protocol exchange: encode + send the action frame, then block
// for exactly one state frame. Throws TimeoutError / DisconnectedError from
// the transport and the codec's errors on malformed values.
std::vector<float> env_exchange(Transport& transport, std::span<const float> action,
                                std::size_t state_dim, double timeout_s = 5.0);

// Measures the achievable exchange rate: `count` zero-action exchanges,
// returns exchanges per second. Throws InvalidCountError when count == 0.
double measure_frequency(Transport& transport, std::size_t action_dim, std::size_t state_dim,
                         std::size_t count, double timeout_s = 5.0);

}  // namespace hubrl::wire
