#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hubrl/normalize.hpp"
#include "hubrl/rng.hpp"
#include "hubrl/types.hpp"
#include "hubrl/wire/transport.hpp"

namespace hubrl::envs {

enum class Backend { transport, simulation };

// Static description of one registered environment.
struct EnvDescriptor {
  std::string name;
  int action_dim = 0;
  BoundedSpec observation_bounds;        // raw bounds of the "vec" channel
  bool has_image = false;                // 64x64 [0,255] plane alongside vec
  BoundedSpec command_range;             // per-motor mapped command units
  int max_steps = 0;
  Backend default_backend = Backend::transport;
  // wire frame sizes: the hub consumes action_dim floats and produces
  // hub_state_dim floats (the env may append goal/direction channels on top)
  int hub_state_dim = 0;

  int vec_dim() const { return observation_bounds.size(); }
};

// Per-instance configuration; every field has the registry default.
struct EnvConfig {
  std::uint64_t seed = 0;
  std::optional<Backend> backend;          // override the registry default
  double step_interval_s = -1.0;           // <0: env default (walker 0.5 s)
  double success_threshold_deg = 5.0;
  std::string reward_mode = "dense";       // dense | sparse (arm family)
  bool noise_enabled = true;
  double transport_timeout_s = 5.0;
  double walker_halt_threshold_mm = 100.0;
  bool action_penalty_abs = false;         // walker action cost on |a|
};

struct StepInfo {
  std::vector<double> raw_state;           // unnormalized backend state
  int step_index = 0;
  bool success = false;                    // goal tasks only
  std::optional<double> goal_error_l1_deg; // arm goal tasks only
};

struct StepResult {
  ObservationMap observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// Step/reset contract shared by all seven environments. Instances are
// single-threaded; distinct instances are independent.
class Env {
 public:
  virtual ~Env() = default;

  const EnvDescriptor& descriptor() const { return desc_; }
  const EnvConfig& config() const { return cfg_; }
  Backend backend() const { return backend_; }

  // Returns the normalized initial observation. Goal tasks sample a fresh
  // goal; the spin task samples its direction.
  virtual ObservationMap reset() = 0;

  // Advances one step. Throws ActionOutOfBoundsError for any |a_i| > 1
  // (reject, don't clamp) and Error if called before reset or after done.
  virtual StepResult step(std::span<const float> action) = 0;

  long clamped_observation_values() const { return norm_stats_.clamped; }

 protected:
  Env(EnvDescriptor desc, EnvConfig cfg, Backend backend)
      : desc_(std::move(desc)), cfg_(std::move(cfg)), backend_(backend),
        rng_(SeededRng(cfg_.seed).fork("env/" + desc_.name)) {}

  void check_action(std::span<const float> action) const;
  void check_stepping_allowed() const;

  EnvDescriptor desc_;
  EnvConfig cfg_;
  Backend backend_;
  SeededRng rng_;
  NormalizeStats norm_stats_;
  int step_count_ = 0;
  bool episode_open_ = false;  // reset called and not yet done
  bool ever_reset_ = false;
};

// Name-keyed registry of the seven environments.
std::vector<std::string> registered_envs();
EnvDescriptor descriptor_for(const std::string& name);  // UnknownEnvError

// Builds an environment. Transport-backend instances need a connected hub
// endpoint (see the harness mock-hub launcher); simulation instances must
// not be given one.
std::unique_ptr<Env> make_env(const std::string& name, const EnvConfig& cfg = {},
                              std::unique_ptr<wire::Transport> transport = nullptr);

// The raw action whose mapped command is zero motion on every motor (used
// for reset reads and the safety halt). For symmetric command ranges this is
// the zero vector; for the walker's [-100,0] range it is all ones.
std::vector<float> no_motion_action(const EnvDescriptor& desc);

}  // namespace hubrl::envs
