#pragma once

#include <string>
#include <vector>

#include "hubrl/agents/agent.hpp"
#include "hubrl/harness/logging.hpp"
#include "hubrl/harness/run_config.hpp"

namespace hubrl::harness {

struct TrainResult {
  std::string run_dir;
  std::string csv_path;
  std::string checkpoint_path;
  std::vector<EpisodeRecord> records;  // prefill episodes first, then training
};

// Runs prefill_episodes of uniform-random actions, then cfg.episodes with the
// learner (explore-mode actions, one update cycle per environment step once
// the buffer holds a full batch). Writes train.csv, debug.log (per-episode
// action-source tags) and checkpoint.bin into cfg.out_dir. Transport-backend
// environments get an auto-spawned in-process mock hub. Config problems throw
// before anything runs; transport failures mid-run flush partial logs before
// rethrowing. Simulation-backend runs are deterministic given cfg.seed
// (wall_seconds excepted).
TrainResult train(const RunConfig& cfg);

struct EvalResult {
  double mean_return = 0.0;
  double stddev_return = 0.0;  // population standard deviation
  double success_rate = 0.0;   // goal tasks; fraction of episodes in [0, 1]
  double mean_steps = 0.0;
  int episodes = 0;
  std::vector<double> returns;
  std::vector<EpisodeRecord> records;
};

// Eval-mode actions, `episodes` per evaluation seed, seeds derived as
// base_seed + {0..seeds-1}. Aggregates over all seeds x episodes. Throws
// InvalidCountError when episodes or seeds is zero and SpecMismatchError when
// the checkpoint does not fit the environment. Never mutates the checkpoint.
EvalResult evaluate(const std::string& checkpoint_path, const std::string& env_name, int episodes,
                    int seeds, std::uint64_t base_seed, const envs::EnvConfig& env_overrides = {},
                    double hub_delay_s = 0.0);

// Same loop for an already-constructed agent.
EvalResult evaluate_agent(agents::Agent& agent, const std::string& env_name, int episodes,
                          int seeds, std::uint64_t base_seed,
                          const envs::EnvConfig& env_overrides = {}, double hub_delay_s = 0.0);

}  // namespace hubrl::harness
