#include "hubrl/dynamics/motor.hpp"

#include <algorithm>

#include "hubrl/angles.hpp"
#include "hubrl/errors.hpp"
#include "hubrl/normalize.hpp"

namespace hubrl::dynamics {

MotorState additive_motor_step(const MotorState& s, std::span<const float> action,
                               const BoundedSpec& command_range, const NoiseModel& noise,
                               AngleLimit limit, SeededRng& rng) {
  const int n = static_cast<int>(s.angles.size());
  if (static_cast<int>(action.size()) != n || command_range.size() != n || s.bounds.size() != n)
    throw ShapeMismatchError("motor step: action/command/bounds sizes disagree");

  MotorState next = s;
  for (int i = 0; i < n; ++i) {
    double a = action[i];
    if (noise.stddev > 0.0 && noise.applied_to == NoiseModel::Target::action)
      a += rng.normal(noise.mean, noise.stddev);
    double delta = denormalize_value(a, command_range.low(i), command_range.high(i));
    if (noise.stddev > 0.0 && noise.applied_to == NoiseModel::Target::motor_state)
      delta += rng.normal(noise.mean, noise.stddev);
    const double raw = s.angles[static_cast<std::size_t>(i)] + delta;
    const double lo = s.bounds.low(i), hi = s.bounds.high(i);
    next.angles[static_cast<std::size_t>(i)] =
        limit == AngleLimit::wrap ? lo + positive_fmod(raw - lo, hi - lo) : std::clamp(raw, lo, hi);
  }
  return next;
}

// ------------------------------------------------------------ quadruped

BoundedSpec walker_motor_bounds() { return BoundedSpec::uniform(4, 0.0, 360.0); }
BoundedSpec walker_command_range() { return BoundedSpec::uniform(4, -100.0, 0.0); }
NoiseModel walker_noise() { return {0.0, 18.0, NoiseModel::Target::motor_state}; }

MotorState walker_reset() { return {{0.0, 0.0, 0.0, 0.0}, walker_motor_bounds()}; }

MotorState walker_sim_step(const MotorState& s, std::span<const float> action, SeededRng& rng,
                           bool noise_enabled) {
  const NoiseModel noise = noise_enabled ? walker_noise() : NoiseModel{};
  return additive_motor_step(s, action, walker_command_range(), noise, AngleLimit::wrap, rng);
}

// ------------------------------------------------------------ arm

BoundedSpec roboarm_motor_bounds() {
  BoundedSpec b;
  b.append(0.0, 360.0).append(10.0, 70.0).append(-150.0, 10.0).append(-148.0, -45.0);
  return b;
}

BoundedSpec roboarm_command_range() {
  BoundedSpec b;
  b.append(-100.0, 100.0).append(-30.0, 30.0).append(-60.0, 60.0).append(-25.0, 25.0);
  return b;
}

NoiseModel roboarm_noise() { return {0.0, 0.05, NoiseModel::Target::action}; }

static MotorState midpoint_reset(const BoundedSpec& bounds) {
  MotorState s;
  s.bounds = bounds;
  s.angles.reserve(static_cast<std::size_t>(bounds.size()));
  for (int i = 0; i < bounds.size(); ++i) s.angles.push_back(0.5 * (bounds.low(i) + bounds.high(i)));
  return s;
}

MotorState roboarm_reset() { return midpoint_reset(roboarm_motor_bounds()); }

MotorState roboarm_sim_step(const MotorState& s, std::span<const float> action, SeededRng& rng,
                            bool noise_enabled) {
  const NoiseModel noise = noise_enabled ? roboarm_noise() : NoiseModel{};
  return additive_motor_step(s, action, roboarm_command_range(), noise, AngleLimit::clamp, rng);
}

BoundedSpec mixed_arm_motor_bounds() {
  BoundedSpec b;
  b.append(0.0, 360.0).append(10.0, 70.0).append(-150.0, 10.0);
  return b;
}

BoundedSpec mixed_arm_command_range() {
  BoundedSpec b;
  b.append(-90.0, 90.0).append(-30.0, 30.0).append(-60.0, 60.0);
  return b;
}

MotorState mixed_arm_reset() { return midpoint_reset(mixed_arm_motor_bounds()); }

MotorState mixed_arm_sim_step(const MotorState& s, std::span<const float> action, SeededRng& rng,
                              bool noise_enabled) {
  const NoiseModel noise = noise_enabled ? roboarm_noise() : NoiseModel{};
  return additive_motor_step(s, action, mixed_arm_command_range(), noise, AngleLimit::clamp, rng);
}

}  // namespace hubrl::dynamics
