#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hubrl/agents/config.hpp"
#include "hubrl/envs/env.hpp"

namespace hubrl::harness {

// Everything one training or evaluation run needs. agent_cfg starts from the
// per-algorithm defaults of `agent` and is then patched by config-file and
// command-line overrides (command line wins).
struct RunConfig {
  std::string env;
  std::string agent = "sac";
  int episodes = 0;
  std::uint64_t seed = 1;
  std::string out_dir = "run";
  agents::AgentConfig agent_cfg;
  envs::EnvConfig env_cfg;     // seed is overwritten from `seed` at use
  double hub_delay_s = 0.0;    // pacing of the auto-spawned mock hub
  int eval_episodes = 5;
  int eval_seeds = 5;
};

using KvPairs = std::vector<std::pair<std::string, std::string>>;

// Flat `key = value` lines; '#' starts a comment; blank lines ignored.
KvPairs load_config_file(const std::string& path);

// Applies file pairs then cli pairs on top of defaults. Throws ConfigError
// for unknown keys or unparseable values.
RunConfig build_run_config(const KvPairs& file_pairs, const KvPairs& cli_pairs);

}  // namespace hubrl::harness
