#pragma once

#include <span>

#include "hubrl/dynamics/motor.hpp"

namespace hubrl::dynamics {

// Invented desk-scale stand-ins for the three robots that only exist as
// physical hardware. They are deliberately non-physical: their job is to
// exercise the full wire path (and give the drive-away task something
// learnable), not to model the real machines.

// Differential-drive base with an ultrasonic sensor. `distance` is how far
// the robot has driven from its starting wall, in mm.
struct TwoWheelerState {
  double left_deg = 0.0;
  double right_deg = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  double distance_mm = 0.0;
};

TwoWheelerState two_wheeler_reset();

// Raw action in [-1,1] maps to a straight drive of [-100,100] mm. Distance
// clamps to [0,2000]; both wheels (56 mm diameter, circumference ~176 mm)
// advance by (drive/176)*360 degrees, mod 360. Pitch/roll stay 0.
TwoWheelerState mock_2wheeler_step(const TwoWheelerState& s, float action);

// Same base driven as a spinner: the two wheel commands oppose each other
// and the gyro reports yaw rate.
struct SpinnerState {
  double left_deg = 0.0;
  double right_deg = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  double omega_z = 0.0;
};

SpinnerState spinner_reset();

// omega_z = clamp(50*(a_right - a_left), [-100,100]); each wheel advances by
// its mapped [-100,100] degrees, mod 360. Pitch/roll stay 0.
SpinnerState mock_spinner_step(const SpinnerState& s, std::span<const float> action);

// Synthetic overhead-camera projection for the three-motor arm: the marker
// ball's pixel position in the 64x64 frame. x follows the rotation motor
// across its [0,360] range onto [4,59]; y follows the midpoint of the
// low/high joint angles across its reachable range onto [4,59].
struct PixelPos {
  int x = 0;
  int y = 0;
};

PixelPos mock_arm_camera_state(const MotorState& arm);

}  // namespace hubrl::dynamics
