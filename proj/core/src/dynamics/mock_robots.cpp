#include "hubrl/dynamics/mock_robots.hpp"

#include <algorithm>
#include <cmath>

#include "hubrl/angles.hpp"
#include "hubrl/errors.hpp"
#include "hubrl/normalize.hpp"

namespace hubrl::dynamics {

namespace {
constexpr double kWheelCircumferenceMm = 176.0;  // 56 mm LEGO wheel
}

TwoWheelerState two_wheeler_reset() { return {}; }

TwoWheelerState mock_2wheeler_step(const TwoWheelerState& s, float action) {
  TwoWheelerState next = s;
  const double drive_mm = denormalize_value(action, -100.0, 100.0);
  next.distance_mm = std::clamp(s.distance_mm + drive_mm, 0.0, 2000.0);
  const double wheel_deg = (drive_mm / kWheelCircumferenceMm) * 360.0;
  next.left_deg = positive_fmod(s.left_deg + wheel_deg, 360.0);
  next.right_deg = positive_fmod(s.right_deg + wheel_deg, 360.0);
  next.pitch = next.roll = 0.0;
  return next;
}

SpinnerState spinner_reset() { return {}; }

SpinnerState mock_spinner_step(const SpinnerState& s, std::span<const float> action) {
  if (action.size() != 2) throw ShapeMismatchError("spinner expects a 2-dim action");
  SpinnerState next = s;
  const double left_deg = denormalize_value(action[0], -100.0, 100.0);
  const double right_deg = denormalize_value(action[1], -100.0, 100.0);
  next.left_deg = positive_fmod(s.left_deg + left_deg, 360.0);
  next.right_deg = positive_fmod(s.right_deg + right_deg, 360.0);
  next.omega_z = std::clamp(50.0 * (action[1] - action[0]), -100.0, 100.0);
  next.pitch = next.roll = 0.0;
  return next;
}

PixelPos mock_arm_camera_state(const MotorState& arm) {
  if (arm.angles.size() != 3) throw ShapeMismatchError("camera projection expects 3 arm motors");
  const double rot_lo = arm.bounds.low(0), rot_hi = arm.bounds.high(0);
  const double mid = 0.5 * (arm.angles[1] + arm.angles[2]);
  const double mid_lo = 0.5 * (arm.bounds.low(1) + arm.bounds.low(2));
  const double mid_hi = 0.5 * (arm.bounds.high(1) + arm.bounds.high(2));
  const double x = 4.0 + (arm.angles[0] - rot_lo) / (rot_hi - rot_lo) * 55.0;
  const double y = 4.0 + (mid - mid_lo) / (mid_hi - mid_lo) * 55.0;
  return {static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
}

}  // namespace hubrl::dynamics
