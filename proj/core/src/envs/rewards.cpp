#include "hubrl/envs/rewards.hpp"

#include <cmath>

#include "hubrl/angles.hpp"
#include "hubrl/errors.hpp"

namespace hubrl::envs {

namespace {
constexpr double kDegPerRad = 180.0 / M_PI;
}

int reward_runaway(double dist_mm, double dist_prev_mm) {
  if (dist_mm > dist_prev_mm) return 1;
  if (dist_mm < dist_prev_mm) return -1;
  return 0;
}

double reward_spinning(double omega_z, int direction) {
  return direction == 0 ? omega_z : -omega_z;
}

double angular_difference(double theta1_deg, double theta2_deg) {
  return std::abs(positive_fmod(theta2_deg - theta1_deg + 180.0, 360.0) - 180.0);
}

double shortest_arc_deg(double from_deg, double to_deg) {
  const double d = (to_deg - from_deg) / kDegPerRad;
  return std::atan2(std::sin(d), std::cos(d)) * kDegPerRad;
}

double reward_walker(double lf_deg, double rf_deg, double lb_deg, double rb_deg,
                     std::span<const float> actions, bool absolute_action_cost) {
  double action_sum = 0.0;
  for (float a : actions) action_sum += absolute_action_cost ? std::abs(a) : a;
  return -action_sum / 40.0                                  //
         - angular_difference(lf_deg, rb_deg) / 180.0        // diagonal pairs in phase
         - angular_difference(rf_deg, lb_deg) / 180.0        //
         - (180.0 - angular_difference(lf_deg, rf_deg)) / 180.0  // lateral pairs out of phase
         - (180.0 - angular_difference(lb_deg, rb_deg)) / 180.0;
}

double goal_error_l1_deg(std::span<const double> current_deg, std::span<const double> goal_deg) {
  if (current_deg.size() != goal_deg.size())
    throw ShapeMismatchError("goal error: current/goal sizes disagree");
  double sum = 0.0;
  for (std::size_t i = 0; i < current_deg.size(); ++i)
    sum += std::abs(shortest_arc_deg(current_deg[i], goal_deg[i]));
  return sum;
}

double reward_roboarm_dense(std::span<const double> current_deg, std::span<const double> goal_deg) {
  return -goal_error_l1_deg(current_deg, goal_deg) / 100.0;
}

bool check_success(std::span<const double> current_deg, std::span<const double> goal_deg,
                   double threshold_deg) {
  if (current_deg.size() != goal_deg.size())
    throw ShapeMismatchError("success check: current/goal sizes disagree");
  for (std::size_t i = 0; i < current_deg.size(); ++i)
    if (std::abs(shortest_arc_deg(current_deg[i], goal_deg[i])) >= threshold_deg) return false;
  return true;
}

int reward_roboarm_sparse(std::span<const double> current_deg, std::span<const double> goal_deg,
                          double threshold_deg) {
  return check_success(current_deg, goal_deg, threshold_deg) ? 1 : 0;
}

bool walker_safety_gate(double distance_mm, double threshold_mm) {
  return distance_mm < threshold_mm;
}

}  // namespace hubrl::envs
