#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "hubrl/dynamics/mock_robots.hpp"
#include "hubrl/dynamics/motor.hpp"
#include "hubrl/envs/env.hpp"
#include "hubrl/envs/rewards.hpp"
#include "hubrl/errors.hpp"
#include "hubrl/vision/vision.hpp"
#include "hubrl/wire/frame.hpp"

namespace hubrl::envs {

// ----------------------------------------------------------------- base

void Env::check_action(std::span<const float> action) const {
  if (static_cast<int>(action.size()) != desc_.action_dim)
    throw ShapeMismatchError(desc_.name + ": expected " + std::to_string(desc_.action_dim) +
                             "-dim action, got " + std::to_string(action.size()));
  for (float a : action)
    if (!(a >= -1.0f && a <= 1.0f))  // also rejects NaN
      throw ActionOutOfBoundsError(desc_.name + ": action component " + std::to_string(a) +
                                   " outside [-1, 1]");
}

void Env::check_stepping_allowed() const {
  if (!ever_reset_) throw Error(desc_.name + ": step() before reset()");
  if (!episode_open_) throw Error(desc_.name + ": step() after the episode finished; reset first");
}

std::vector<float> no_motion_action(const EnvDescriptor& desc) {
  std::vector<float> a(static_cast<std::size_t>(desc.action_dim));
  for (int i = 0; i < desc.action_dim; ++i) {
    const double lo = desc.command_range.low(i), hi = desc.command_range.high(i);
    a[static_cast<std::size_t>(i)] =
        static_cast<float>(std::clamp(2.0 * (0.0 - lo) / (hi - lo) - 1.0, -1.0, 1.0));
  }
  return a;
}

namespace {

using dynamics::MotorState;

std::vector<double> widen(const std::vector<float>& v) {
  return std::vector<double>(v.begin(), v.end());
}

// One request/response exchange with an optional settle wait between the
// action write and the state read (the walking robot needs time to move
// before its pose is worth reading).
std::vector<double> exchange(wire::Transport& t, std::span<const float> action, int state_dim,
                             double wait_s, double timeout_s) {
  t.write(wire::encode_frame(action).payload);
  if (wait_s > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(state_dim) * 4);
  t.read_exact(buf, timeout_s);
  return widen(wire::decode_frame(buf, static_cast<std::size_t>(state_dim)));
}

// --------------------------------------------------------------- RunAway

class RunAwayEnv final : public Env {
 public:
  RunAwayEnv(EnvDescriptor d, EnvConfig c, Backend b, std::unique_ptr<wire::Transport> t)
      : Env(std::move(d), std::move(c), b), transport_(std::move(t)) {}

  ObservationMap reset() override {
    if (backend_ == Backend::transport) {
      raw_ = exchange(*transport_, no_motion_action(desc_), desc_.hub_state_dim, 0.0,
                      cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::two_wheeler_reset();
      raw_ = pack(sim_);
    }
    step_count_ = 0;
    episode_open_ = ever_reset_ = true;
    return make_obs();
  }

  StepResult step(std::span<const float> action) override {
    check_stepping_allowed();
    check_action(action);
    const double prev_dist = raw_[4];
    if (backend_ == Backend::transport) {
      raw_ = exchange(*transport_, action, desc_.hub_state_dim, 0.0, cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::mock_2wheeler_step(sim_, action[0]);
      raw_ = pack(sim_);
    }
    ++step_count_;
    StepResult r;
    r.reward = reward_runaway(raw_[4], prev_dist);
    r.done = step_count_ >= desc_.max_steps || raw_[4] >= 2000.0;
    r.info = {raw_, step_count_, false, std::nullopt};
    r.observation = make_obs();
    episode_open_ = !r.done;
    return r;
  }

 private:
  static std::vector<double> pack(const dynamics::TwoWheelerState& s) {
    return {s.left_deg, s.right_deg, s.pitch, s.roll, s.distance_mm};
  }
  ObservationMap make_obs() {
    return {{"vec", Tensor::vec(normalize(raw_, desc_.observation_bounds, &norm_stats_))}};
  }

  std::unique_ptr<wire::Transport> transport_;
  dynamics::TwoWheelerState sim_;
  std::vector<double> raw_;
};

// -------------------------------------------------------------- Spinning

class SpinningEnv final : public Env {
 public:
  SpinningEnv(EnvDescriptor d, EnvConfig c, Backend b, std::unique_ptr<wire::Transport> t)
      : Env(std::move(d), std::move(c), b), transport_(std::move(t)) {}

  ObservationMap reset() override {
    direction_ = static_cast<int>(rng_.index(2));
    if (backend_ == Backend::transport) {
      raw_ = exchange(*transport_, no_motion_action(desc_), desc_.hub_state_dim, 0.0,
                      cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::spinner_reset();
      raw_ = pack(sim_);
    }
    raw_[5] = direction_;  // the hub sends a placeholder in this slot
    step_count_ = 0;
    episode_open_ = ever_reset_ = true;
    return make_obs();
  }

  StepResult step(std::span<const float> action) override {
    check_stepping_allowed();
    check_action(action);
    if (backend_ == Backend::transport) {
      raw_ = exchange(*transport_, action, desc_.hub_state_dim, 0.0, cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::mock_spinner_step(sim_, action);
      raw_ = pack(sim_);
    }
    raw_[5] = direction_;
    ++step_count_;
    StepResult r;
    r.reward = reward_spinning(raw_[4], direction_);
    r.done = step_count_ >= desc_.max_steps;
    r.info = {raw_, step_count_, false, std::nullopt};
    r.observation = make_obs();
    episode_open_ = !r.done;
    return r;
  }

  int direction() const { return direction_; }

 private:
  static std::vector<double> pack(const dynamics::SpinnerState& s) {
    return {s.left_deg, s.right_deg, s.pitch, s.roll, s.omega_z, 0.0};
  }
  ObservationMap make_obs() {
    return {{"vec", Tensor::vec(normalize(raw_, desc_.observation_bounds, &norm_stats_))}};
  }

  std::unique_ptr<wire::Transport> transport_;
  dynamics::SpinnerState sim_;
  std::vector<double> raw_;
  int direction_ = 0;
};

// ---------------------------------------------------------------- Walker

class WalkerEnv final : public Env {
 public:
  WalkerEnv(EnvDescriptor d, EnvConfig c, Backend b, std::unique_ptr<wire::Transport> t)
      : Env(std::move(d), std::move(c), b), transport_(std::move(t)) {
    interval_s_ = cfg_.step_interval_s >= 0.0 ? cfg_.step_interval_s
                  : backend_ == Backend::transport ? 0.5
                                                   : 0.0;
  }

  ObservationMap reset() override {
    if (backend_ == Backend::transport) {
      raw_ = exchange(*transport_, no_motion_action(desc_), desc_.hub_state_dim, 0.0,
                      cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::walker_reset();
      raw_ = pack(sim_.angles);
    }
    step_count_ = 0;
    episode_open_ = ever_reset_ = true;
    return make_obs();
  }

  StepResult step(std::span<const float> action) override {
    check_stepping_allowed();
    check_action(action);
    if (backend_ == Backend::transport) {
      // keep-out zone: substitute the zero-motion command, episode continues
      std::vector<float> wire_action(action.begin(), action.end());
      if (walker_safety_gate(raw_[6], cfg_.walker_halt_threshold_mm))
        wire_action = no_motion_action(desc_);
      raw_ = exchange(*transport_, wire_action, desc_.hub_state_dim, interval_s_,
                      cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::walker_sim_step(sim_, action, rng_, cfg_.noise_enabled);
      raw_ = pack(sim_.angles);
    }
    ++step_count_;
    StepResult r;
    // pose terms on the reached state; action cost on the agent's raw choice
    r.reward = reward_walker(raw_[0], raw_[1], raw_[2], raw_[3], action, cfg_.action_penalty_abs);
    r.done = step_count_ >= desc_.max_steps;
    r.info = {raw_, step_count_, false, std::nullopt};
    r.observation = make_obs();
    episode_open_ = !r.done;
    return r;
  }

 private:
  static std::vector<double> pack(const std::vector<double>& angles) {
    // IMU and distance channels are identically zero in simulation
    return {angles[0], angles[1], angles[2], angles[3], 0.0, 0.0, 0.0};
  }
  ObservationMap make_obs() {
    return {{"vec", Tensor::vec(normalize(raw_, desc_.observation_bounds, &norm_stats_))}};
  }

  std::unique_ptr<wire::Transport> transport_;
  MotorState sim_;
  std::vector<double> raw_;
  double interval_s_ = 0.0;
};

// --------------------------------------------------------------- RoboArm

class RoboArmEnv final : public Env {
 public:
  RoboArmEnv(EnvDescriptor d, EnvConfig c, Backend b, std::unique_ptr<wire::Transport> t)
      : Env(std::move(d), std::move(c), b), transport_(std::move(t)) {}

  ObservationMap reset() override {
    goal_.resize(4);
    const BoundedSpec motors = dynamics::roboarm_motor_bounds();
    for (int i = 0; i < 4; ++i) goal_[static_cast<std::size_t>(i)] = rng_.uniform(motors.low(i), motors.high(i));
    if (backend_ == Backend::transport) {
      current_ = exchange(*transport_, no_motion_action(desc_), desc_.hub_state_dim, 0.0,
                          cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::roboarm_reset();
      current_ = sim_.angles;
    }
    step_count_ = 0;
    episode_open_ = ever_reset_ = true;
    return make_obs();
  }

  StepResult step(std::span<const float> action) override {
    check_stepping_allowed();
    check_action(action);
    if (backend_ == Backend::transport) {
      current_ = exchange(*transport_, action, desc_.hub_state_dim, 0.0, cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::roboarm_sim_step(sim_, action, rng_, cfg_.noise_enabled);
      current_ = sim_.angles;
    }
    ++step_count_;
    StepResult r;
    const bool success = check_success(current_, goal_, cfg_.success_threshold_deg);
    r.reward = cfg_.reward_mode == "sparse"
                   ? reward_roboarm_sparse(current_, goal_, cfg_.success_threshold_deg)
                   : reward_roboarm_dense(current_, goal_);
    r.done = success || step_count_ >= desc_.max_steps;
    r.info.raw_state = full_raw();
    r.info.step_index = step_count_;
    r.info.success = success;
    r.info.goal_error_l1_deg = goal_error_l1_deg(current_, goal_);
    r.observation = make_obs();
    episode_open_ = !r.done;
    return r;
  }

  const std::vector<double>& goal() const { return goal_; }

 private:
  std::vector<double> full_raw() const {
    std::vector<double> raw = current_;
    raw.insert(raw.end(), goal_.begin(), goal_.end());
    return raw;
  }
  ObservationMap make_obs() {
    return {{"vec", Tensor::vec(normalize(full_raw(), desc_.observation_bounds, &norm_stats_))}};
  }

  std::unique_ptr<wire::Transport> transport_;
  MotorState sim_;
  std::vector<double> current_;
  std::vector<double> goal_;
};

// --------------------------------------------------------- RoboArm-mixed

class MixedArmEnv final : public Env {
 public:
  MixedArmEnv(EnvDescriptor d, EnvConfig c, Backend b, std::unique_ptr<wire::Transport> t)
      : Env(std::move(d), std::move(c), b), transport_(std::move(t)) {}

  ObservationMap reset() override {
    const BoundedSpec motors = dynamics::mixed_arm_motor_bounds();
    std::vector<double> goal_angles(3);
    for (int i = 0; i < 3; ++i) goal_angles[static_cast<std::size_t>(i)] = rng_.uniform(motors.low(i), motors.high(i));
    const auto gp = dynamics::mock_arm_camera_state({goal_angles, motors});
    // keep the outline fully inside the 64x64 frame
    goal_ = {std::clamp(gp.x, 5, 58), std::clamp(gp.y, 5, 58), 5};
    if (backend_ == Backend::transport) {
      current_ = exchange(*transport_, no_motion_action(desc_), desc_.hub_state_dim, 0.0,
                          cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::mixed_arm_reset();
      current_ = sim_.angles;
    }
    prev_reward_ = 0.0;
    step_count_ = 0;
    episode_open_ = ever_reset_ = true;
    return make_obs();
  }

  StepResult step(std::span<const float> action) override {
    check_stepping_allowed();
    check_action(action);
    if (backend_ == Backend::transport) {
      current_ = exchange(*transport_, action, desc_.hub_state_dim, 0.0, cfg_.transport_timeout_s);
    } else {
      sim_ = dynamics::mixed_arm_sim_step(sim_, action, rng_, cfg_.noise_enabled);
      current_ = sim_.angles;
    }
    ++step_count_;

    const vision::RgbImage img = render();
    const auto centers = vision::detect_red_components(img, vision::default_red_range());
    StepResult r;
    r.reward = vision::reward_mixed(centers, goal_, prev_reward_);
    prev_reward_ = r.reward;
    bool success = false;
    if (!centers.empty()) {
      double mean = 0.0;
      for (const auto& c : centers) mean += std::hypot(c.x - goal_.cx, c.y - goal_.cy);
      mean /= static_cast<double>(centers.size());
      success = mean < goal_.radius;
    }
    r.done = success || step_count_ >= desc_.max_steps;
    r.info = {current_, step_count_, success, std::nullopt};
    r.observation = make_obs(img);
    episode_open_ = !r.done;
    return r;
  }

  const vision::GoalCircle& goal_circle() const { return goal_; }

 private:
  vision::RgbImage render() const {
    const auto ball =
        dynamics::mock_arm_camera_state({current_, dynamics::mixed_arm_motor_bounds()});
    return vision::render_scene(ball.x, ball.y, goal_);
  }
  ObservationMap make_obs() { return make_obs(render()); }
  ObservationMap make_obs(const vision::RgbImage& img) {
    Tensor image = vision::to_grayscale_obs(img);
    for (float& v : image.data) v /= 255.0f;  // agent sees [0,1]
    return {{"vec", Tensor::vec(normalize(current_, desc_.observation_bounds, &norm_stats_))},
            {"image", std::move(image)}};
  }

  std::unique_ptr<wire::Transport> transport_;
  MotorState sim_;
  std::vector<double> current_;
  vision::GoalCircle goal_;
  double prev_reward_ = 0.0;
};

// -------------------------------------------------------------- registry

BoundedSpec imu_bounds() { return BoundedSpec().append(-90.0, 90.0).append(-90.0, 90.0); }

EnvDescriptor runaway_desc() {
  EnvDescriptor d;
  d.name = "RunAway-v0";
  d.action_dim = 1;
  d.observation_bounds = BoundedSpec()
                             .append(0.0, 360.0)
                             .append(0.0, 360.0)
                             .append(-90.0, 90.0)
                             .append(-90.0, 90.0)
                             .append(0.0, 2000.0);
  d.command_range = BoundedSpec::uniform(1, -100.0, 100.0);
  d.max_steps = 20;
  d.default_backend = Backend::transport;
  d.hub_state_dim = 5;
  return d;
}

EnvDescriptor spinning_desc() {
  EnvDescriptor d;
  d.name = "Spinning-v0";
  d.action_dim = 2;
  d.observation_bounds = BoundedSpec()
                             .append(0.0, 360.0)
                             .append(0.0, 360.0)
                             .append(-90.0, 90.0)
                             .append(-90.0, 90.0)
                             .append(-100.0, 100.0)
                             .append(0.0, 1.0);
  d.command_range = BoundedSpec::uniform(2, -100.0, 100.0);
  d.max_steps = 50;
  d.default_backend = Backend::transport;
  d.hub_state_dim = 6;
  return d;
}

EnvDescriptor walker_desc(bool sim) {
  EnvDescriptor d;
  d.name = sim ? "WalkerSim-v0" : "Walker-v0";
  d.action_dim = 4;
  d.observation_bounds = dynamics::walker_motor_bounds();
  for (const auto& b : imu_bounds().dims) d.observation_bounds.dims.push_back(b);
  d.observation_bounds.append(0.0, 2000.0);
  d.command_range = dynamics::walker_command_range();
  d.max_steps = 100;
  d.default_backend = sim ? Backend::simulation : Backend::transport;
  d.hub_state_dim = 7;
  return d;
}

EnvDescriptor roboarm_desc(bool sim) {
  EnvDescriptor d;
  d.name = sim ? "RoboArmSim-v0" : "RoboArm-v0";
  d.action_dim = 4;
  d.observation_bounds = dynamics::roboarm_motor_bounds();
  for (const auto& b : dynamics::roboarm_motor_bounds().dims)
    d.observation_bounds.dims.push_back(b);  // goal channels share motor bounds
  d.command_range = dynamics::roboarm_command_range();
  d.max_steps = 100;
  d.default_backend = sim ? Backend::simulation : Backend::transport;
  d.hub_state_dim = 4;
  return d;
}

EnvDescriptor mixed_desc() {
  EnvDescriptor d;
  d.name = "RoboArm-mixed-v0";
  d.action_dim = 3;
  d.observation_bounds = dynamics::mixed_arm_motor_bounds();
  d.has_image = true;
  d.command_range = dynamics::mixed_arm_command_range();
  d.max_steps = 30;
  d.default_backend = Backend::transport;
  d.hub_state_dim = 3;
  return d;
}

}  // namespace

std::vector<std::string> registered_envs() {
  return {"RunAway-v0",    "Spinning-v0",   "Walker-v0",        "WalkerSim-v0",
          "RoboArm-v0",    "RoboArmSim-v0", "RoboArm-mixed-v0"};
}

EnvDescriptor descriptor_for(const std::string& name) {
  if (name == "RunAway-v0") return runaway_desc();
  if (name == "Spinning-v0") return spinning_desc();
  if (name == "Walker-v0") return walker_desc(false);
  if (name == "WalkerSim-v0") return walker_desc(true);
  if (name == "RoboArm-v0") return roboarm_desc(false);
  if (name == "RoboArmSim-v0") return roboarm_desc(true);
  if (name == "RoboArm-mixed-v0") return mixed_desc();
  throw UnknownEnvError("no environment named '" + name + "'");
}

std::unique_ptr<Env> make_env(const std::string& name, const EnvConfig& cfg,
                              std::unique_ptr<wire::Transport> transport) {
  const EnvDescriptor desc = descriptor_for(name);
  const Backend backend = cfg.backend.value_or(desc.default_backend);
  if (backend == Backend::transport && !transport)
    throw ConfigError(name + ": transport backend needs a connected hub endpoint");
  if (backend == Backend::simulation && transport)
    throw ConfigError(name + ": simulation backend must not be given a transport");
  if (cfg.reward_mode != "dense" && cfg.reward_mode != "sparse")
    throw ConfigError("reward_mode must be dense or sparse, got '" + cfg.reward_mode + "'");
  if (cfg.success_threshold_deg <= 0.0) throw ConfigError("success_threshold_deg must be > 0");

  if (name == "RunAway-v0")
    return std::make_unique<RunAwayEnv>(desc, cfg, backend, std::move(transport));
  if (name == "Spinning-v0")
    return std::make_unique<SpinningEnv>(desc, cfg, backend, std::move(transport));
  if (name == "Walker-v0" || name == "WalkerSim-v0")
    return std::make_unique<WalkerEnv>(desc, cfg, backend, std::move(transport));
  if (name == "RoboArm-v0" || name == "RoboArmSim-v0")
    return std::make_unique<RoboArmEnv>(desc, cfg, backend, std::move(transport));
  return std::make_unique<MixedArmEnv>(desc, cfg, backend, std::move(transport));
}

}  // namespace hubrl::envs
