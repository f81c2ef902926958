#include "hubrl/harness/mock_hub.hpp"

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>

#include "hubrl/dynamics/mock_robots.hpp"
#include "hubrl/dynamics/motor.hpp"
#include "hubrl/envs/env.hpp"
#include "hubrl/errors.hpp"

namespace hubrl::harness {

namespace {

bool all_zero(std::span<const float> a) {
  return std::all_of(a.begin(), a.end(), [](float v) { return v == 0.0f; });
}

std::vector<float> to_f32(std::initializer_list<double> vals) {
  std::vector<float> out;
  out.reserve(vals.size());
  for (double v : vals) out.push_back(static_cast<float>(v));
  return out;
}

}  // namespace

wire::HubProgram mock_hub_program(const std::string& env_name, const HubOptions& opts) {
  const envs::EnvDescriptor desc = envs::descriptor_for(env_name);  // UnknownEnvError
  wire::HubProgram prog;
  prog.action_dim = static_cast<std::size_t>(desc.action_dim);
  prog.state_dim = static_cast<std::size_t>(desc.hub_state_dim);
  prog.step_delay_s = opts.step_delay_s;
  auto rng = std::make_shared<SeededRng>(SeededRng(opts.seed).fork("hub/" + env_name));
  const bool noise = opts.noise;

  if (env_name == "RunAway-v0") {
    // An all-zero command doubles as "the operator put the robot back at the
    // wall": the reset read between episodes restarts the drive-away run.
    auto st = std::make_shared<dynamics::TwoWheelerState>(dynamics::two_wheeler_reset());
    prog.dynamics = [st](std::span<const float> a) {
      if (all_zero(a))
        *st = dynamics::two_wheeler_reset();
      else
        *st = dynamics::mock_2wheeler_step(*st, a[0]);
      return to_f32({st->left_deg, st->right_deg, st->pitch, st->roll, st->distance_mm});
    };
  } else if (env_name == "Spinning-v0") {
    auto st = std::make_shared<dynamics::SpinnerState>(dynamics::spinner_reset());
    prog.dynamics = [st](std::span<const float> a) {
      *st = dynamics::mock_spinner_step(*st, a);
      // trailing slot is the direction channel the env fills in itself
      return to_f32({st->left_deg, st->right_deg, st->pitch, st->roll, st->omega_z, 0.0});
    };
  } else if (env_name == "Walker-v0" || env_name == "WalkerSim-v0") {
    auto st = std::make_shared<dynamics::MotorState>(dynamics::walker_reset());
    prog.dynamics = [st, rng, noise](std::span<const float> a) {
      *st = dynamics::walker_sim_step(*st, a, *rng, noise);
      // bench rig: level attitude, nothing in front of the ultrasonic sensor
      return to_f32({st->angles[0], st->angles[1], st->angles[2], st->angles[3], 0.0, 0.0, 2000.0});
    };
  } else if (env_name == "RoboArm-v0" || env_name == "RoboArmSim-v0") {
    auto st = std::make_shared<dynamics::MotorState>(dynamics::roboarm_reset());
    prog.dynamics = [st, rng, noise](std::span<const float> a) {
      *st = dynamics::roboarm_sim_step(*st, a, *rng, noise);
      return to_f32({st->angles[0], st->angles[1], st->angles[2], st->angles[3]});
    };
  } else if (env_name == "RoboArm-mixed-v0") {
    auto st = std::make_shared<dynamics::MotorState>(dynamics::mixed_arm_reset());
    prog.dynamics = [st, rng, noise](std::span<const float> a) {
      *st = dynamics::mixed_arm_sim_step(*st, a, *rng, noise);
      return to_f32({st->angles[0], st->angles[1], st->angles[2]});
    };
  } else {
    throw UnknownEnvError("no mock hub for environment: " + env_name);
  }
  return prog;
}

HubHandle::HubHandle(std::unique_ptr<wire::Transport> env_side,
                     std::shared_ptr<wire::Transport> hub_side, std::thread worker,
                     std::shared_ptr<long> served)
    : env_side_(std::move(env_side)), hub_side_(std::move(hub_side)), worker_(std::move(worker)),
      served_(std::move(served)) {}

HubHandle::~HubHandle() { close(); }

std::unique_ptr<wire::Transport> HubHandle::take_transport() {
  if (!env_side_) throw Error("mock hub: transport already taken");
  return std::move(env_side_);
}

long HubHandle::exchanges_served() const { return *served_; }

void HubHandle::close() {
  if (closed_) return;
  closed_ = true;
  if (env_side_) env_side_->close();
  if (hub_side_) hub_side_->close();
  if (worker_.joinable()) worker_.join();
}

std::unique_ptr<HubHandle> spawn_mock_hub(const std::string& env_name, const HubOptions& opts) {
  wire::HubProgram prog = mock_hub_program(env_name, opts);
  auto [env_side, hub_side_unique] = wire::make_loopback_pair();
  std::shared_ptr<wire::Transport> hub_side = std::move(hub_side_unique);
  auto served = std::make_shared<long>(0);
  std::thread worker(
      [prog, hub_side, served] { *served = wire::run_hub_program(prog, *hub_side); });
  return std::make_unique<HubHandle>(std::move(env_side), hub_side, std::move(worker), served);
}

HubProcess::HubProcess(pid_t pid, std::unique_ptr<wire::Transport> env_side)
    : pid_(pid), env_side_(std::move(env_side)) {}

HubProcess::~HubProcess() { wait(); }

std::unique_ptr<wire::Transport> HubProcess::take_transport() {
  if (!env_side_) throw Error("hub process: transport already taken");
  return std::move(env_side_);
}

int HubProcess::wait() {
  if (reaped_) return exit_code_;
  env_side_.reset();  // end-of-stream tells the child to exit
  int status = 0;
  ::waitpid(pid_, &status, 0);
  exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  reaped_ = true;
  return exit_code_;
}

std::unique_ptr<HubProcess> spawn_hub_process(const std::string& cli_path,
                                              const std::string& env_name,
                                              const HubOptions& opts) {
  envs::descriptor_for(env_name);  // validate before forking
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) != 0)
    throw Error("hub process: socketpair failed");
  char delay[32], seed[32];
  std::snprintf(delay, sizeof delay, "%.9g", opts.step_delay_s);
  std::snprintf(seed, sizeof seed, "%llu", static_cast<unsigned long long>(opts.seed));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw Error("hub process: fork failed");
  }
  if (pid == 0) {
    ::dup2(sv[1], 0);
    ::dup2(sv[1], 1);
    ::close(sv[0]);
    ::close(sv[1]);
    if (opts.noise)
      ::execl(cli_path.c_str(), "hubrl", "hub", "--env", env_name.c_str(), "--delay", delay,
              "--seed", seed, static_cast<char*>(nullptr));
    else
      ::execl(cli_path.c_str(), "hubrl", "hub", "--env", env_name.c_str(), "--delay", delay,
              "--seed", seed, "--no-noise", static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(sv[1]);
  return std::make_unique<HubProcess>(pid, wire::make_fd_transport(sv[0], ::dup(sv[0])));
}

}  // namespace hubrl::harness
