#pragma once

#include <string>

#include "hubrl/errors.hpp"

namespace hubrl::agents {

// Learner hyperparameters. Field names double as config-file keys.
struct AgentConfig {
  double lr = 3e-4;
  int batch = 256;
  int utd_ratio = 1;         // gradient updates per environment step
  int prefill_episodes = 10;  // random-policy episodes before learning starts
  int cells = 256;            // hidden width (two hidden layers throughout)
  double gamma = 0.99;
  double soft_update_eps = 0.995;  // target-network retention per update
  double alpha_init = 1.0;
  bool fixed_alpha = false;
  std::string normalization = "none";  // "none" | "layernorm" (critics)
  double dropout = 0.0;                // critic dropout rate
  long buffer = 1'000'000;             // replay capacity
  double exploration_noise = 0.1;      // td3 action noise (explore mode)

  // fixed td3 internals
  double target_noise = 0.2;
  double target_noise_clip = 0.5;
  int policy_delay = 2;
};

// Per-algorithm defaults: the ensemble learner is the entropy learner with
// update-to-data 20, critic dropout 0.01 and layernorm critics.
AgentConfig default_config(const std::string& algo);

// Throws ConfigError on out-of-range values or unknown normalization.
void validate_config(const AgentConfig& cfg);

}  // namespace hubrl::agents
