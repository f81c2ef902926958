#pragma once

#include <span>

namespace hubrl::envs {

// +1 if the robot opened distance since the last step, -1 if it lost
// distance, 0 if unchanged.
int reward_runaway(double dist_mm, double dist_prev_mm);

// The gyro's yaw rate is the reward; direction 0 rewards positive spin,
// direction 1 rewards negative spin.
double reward_spinning(double omega_z, int direction);

// Shortest arc between two angles in degrees, in [0, 180]:
// |((t2 - t1 + 180) mod 360) - 180| with a non-negative mod.
double angular_difference(double theta1_deg, double theta2_deg);

// Signed shortest arc from `from_deg` to `to_deg` in (-180, 180], computed
// via atan2 of the angle difference.
double shortest_arc_deg(double from_deg, double to_deg);

// Five-term gait shaping: an action-magnitude term -sum(actions)/40, two
// diagonal leg pairs penalized for being out of phase, and two lateral leg
// pairs penalized for being *in* phase:
//   R = -sum(a)/40 - AD(lf,rb)/180 - AD(rf,lb)/180
//       - (180-AD(lf,rf))/180 - (180-AD(lb,rb))/180
// The formula is evaluated literally over whatever action values are passed
// (the env passes the agent's raw [-1,1] actions). `absolute_action_cost`
// switches the first term to -sum(|a|)/40.
double reward_walker(double lf_deg, double rf_deg, double lb_deg, double rb_deg,
                     std::span<const float> actions, bool absolute_action_cost = false);

// Dense goal-reaching reward: minus the L1 norm of per-motor shortest
// angular distances, divided by 100. In [-7.2, 0] for four motors.
double reward_roboarm_dense(std::span<const double> current_deg, std::span<const double> goal_deg);

// 1 iff every per-motor shortest angular distance is strictly below the
// threshold, else 0.
int reward_roboarm_sparse(std::span<const double> current_deg, std::span<const double> goal_deg,
                          double threshold_deg);

// Same predicate as the sparse reward; also the early-termination trigger.
bool check_success(std::span<const double> current_deg, std::span<const double> goal_deg,
                   double threshold_deg);

// Sum over motors of |shortest arc to goal|, degrees (the per-episode error
// figure logged for the arm tasks).
double goal_error_l1_deg(std::span<const double> current_deg, std::span<const double> goal_deg);

// True when the ultrasonic reading is inside the keep-out distance; the env
// then substitutes a zero-motion command for this step.
bool walker_safety_gate(double distance_mm, double threshold_mm);

}  // namespace hubrl::envs
