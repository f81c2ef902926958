#include "hubrl/wire/hub.hpp"

#include <chrono>
#include <thread>

#include "hubrl/errors.hpp"
#include "hubrl/wire/frame.hpp"

namespace hubrl::wire {

long run_hub_program(const HubProgram& program, Transport& transport) {
  long exchanges = 0;
  std::vector<std::uint8_t> buf(program.action_dim * 4);
  try {
    for (;;) {
      // poll-then-read, like the firmware's keyboard.poll() loop
      while (!transport.poll(0.05)) {
      }
      transport.read_exact(buf, 5.0);
      const std::vector<float> action = decode_frame(buf, program.action_dim);
      std::vector<float> state = program.dynamics(action);
      if (state.size() != program.state_dim)
        throw ShapeMismatchError("hub dynamics produced a wrong-size state");
      if (program.step_delay_s > 0.0)
        std::this_thread::sleep_for(std::chrono::duration<double>(program.step_delay_s));
      transport.write(encode_frame(state).payload);
      ++exchanges;
    }
  } catch (const DisconnectedError&) {
    // env side hung up — orderly shutdown
  }
  return exchanges;
}

std::vector<float> env_exchange(Transport& transport, std::span<const float> action,
                                std::size_t state_dim, double timeout_s) {
  transport.write(encode_frame(action).payload);
  std::vector<std::uint8_t> buf(state_dim * 4);
  transport.read_exact(buf, timeout_s);
  return decode_frame(buf, state_dim);
}

double measure_frequency(Transport& transport, std::size_t action_dim, std::size_t state_dim,
                         std::size_t count, double timeout_s) {
  if (count == 0) throw InvalidCountError("frequency probe needs at least one exchange");
  const std::vector<float> zeros(action_dim, 0.0f);
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < count; ++i) env_exchange(transport, zeros, state_dim, timeout_s);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  return static_cast<double>(count) / elapsed.count();
}

}  // namespace hubrl::wire
