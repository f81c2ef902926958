#pragma once

#include <span>

#include "hubrl/rng.hpp"
#include "hubrl/types.hpp"

namespace hubrl::dynamics {

// Joint state of a motorized robot model, in degrees, with per-motor bounds.
struct MotorState {
  std::vector<double> angles;
  BoundedSpec bounds;
};

// Gaussian disturbance applied either to the raw action (before the command
// mapping) or to the motor state (after the command is applied).
struct NoiseModel {
  double mean = 0.0;
  double stddev = 0.0;
  enum class Target { motor_state, action } applied_to = Target::motor_state;
};

// What happens when a motor would leave its bounds: physical hard stops
// clamp; free-spinning gear trains wrap around.
enum class AngleLimit { clamp, wrap };

// Shared additive transition: per motor, map the raw [-1,1] action onto its
// command range, add the resulting delta to the current angle, apply noise
// per the model, and enforce bounds. Deterministic and purely additive when
// stddev is 0.
MotorState additive_motor_step(const MotorState& s, std::span<const float> action,
                               const BoundedSpec& command_range, const NoiseModel& noise,
                               AngleLimit limit, SeededRng& rng);

// ------------------------------------------------------------ quadruped

// Four leg motors, each [0,360], commands in [-100,0] degrees per step.
// Per-step state noise is 0.1 in normalized observation units, which on a
// [0,360] channel is 18 degrees. Angles wrap (the legs are cranks driven
// through full rotations; the pose reward is wrap-aware).
BoundedSpec walker_motor_bounds();
BoundedSpec walker_command_range();
NoiseModel walker_noise();

MotorState walker_reset();  // all zeros
MotorState walker_sim_step(const MotorState& s, std::span<const float> action, SeededRng& rng,
                           bool noise_enabled = true);

// ------------------------------------------------------------ arm

// Four arm motors: rotation [0,360] (commands ±100), low [10,70] (±30),
// high [-150,10] (±60), grab [-148,-45] (±25). Action noise N(0, 0.05) is
// added to the raw action before mapping. Joints clamp at their hard stops.
BoundedSpec roboarm_motor_bounds();
BoundedSpec roboarm_command_range();
NoiseModel roboarm_noise();

MotorState roboarm_reset();  // midpoint of every joint range
MotorState roboarm_sim_step(const MotorState& s, std::span<const float> action, SeededRng& rng,
                            bool noise_enabled = true);

// Three-motor arm used by the camera task: rotation (commands ±90), low
// (±30), high (±60); same bounds as the four-motor arm minus the grabber.
BoundedSpec mixed_arm_motor_bounds();
BoundedSpec mixed_arm_command_range();

MotorState mixed_arm_reset();
MotorState mixed_arm_sim_step(const MotorState& s, std::span<const float> action, SeededRng& rng,
                              bool noise_enabled = true);

}  // namespace hubrl::dynamics
