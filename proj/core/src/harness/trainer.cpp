#include "hubrl/harness/trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "hubrl/harness/mock_hub.hpp"
#include "hubrl/replay_buffer.hpp"

namespace hubrl::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// hub rng decoupled from the env seed so the two streams never collide
constexpr std::uint64_t kHubSeedSalt = 0x9e3779b97f4a7c15ull;

struct LiveEnv {
  std::unique_ptr<HubHandle> hub;  // declared first: destroyed after the env
  std::unique_ptr<envs::Env> env;
};

LiveEnv open_env(const std::string& name, envs::EnvConfig env_cfg, double hub_delay_s) {
  const envs::EnvDescriptor desc = envs::descriptor_for(name);
  const envs::Backend backend = env_cfg.backend.value_or(desc.default_backend);
  LiveEnv live;
  if (backend == envs::Backend::transport) {
    HubOptions opts;
    opts.step_delay_s = hub_delay_s;
    opts.noise = env_cfg.noise_enabled;
    opts.seed = env_cfg.seed ^ kHubSeedSalt;
    live.hub = spawn_mock_hub(name, opts);
    live.env = envs::make_env(name, env_cfg, live.hub->take_transport());
  } else {
    live.env = envs::make_env(name, env_cfg);
  }
  return live;
}

std::vector<float> random_action(SeededRng& rng, int action_dim) {
  std::vector<float> a(static_cast<std::size_t>(action_dim));
  for (auto& v : a) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return a;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : lines) out << l << "\n";
}

}  // namespace

TrainResult train(const RunConfig& cfg) {
  // fail on config problems before any episode runs or file is written
  const envs::EnvDescriptor desc = envs::descriptor_for(cfg.env);
  agents::validate_config(cfg.agent_cfg);
  if (cfg.episodes < 0) throw ConfigError("episodes must be non-negative");
  if (cfg.agent != "sac" && cfg.agent != "td3" && cfg.agent != "droq" && cfg.agent != "random")
    throw ConfigError("unknown algorithm: " + cfg.agent);

  envs::EnvConfig env_cfg = cfg.env_cfg;
  env_cfg.seed = cfg.seed;
  LiveEnv live = open_env(cfg.env, env_cfg, cfg.hub_delay_s);
  auto agent =
      agents::make_agent(cfg.agent, cfg.agent_cfg, desc.vec_dim(), desc.has_image,
                         desc.action_dim, cfg.seed);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.agent_cfg.buffer));
  SeededRng prefill_rng = SeededRng(cfg.seed).fork("train/prefill");

  std::filesystem::create_directories(cfg.out_dir);
  TrainResult result;
  result.run_dir = cfg.out_dir;
  result.csv_path = cfg.out_dir + "/train.csv";
  result.checkpoint_path = cfg.out_dir + "/checkpoint.bin";

  std::vector<std::string> debug_lines;
  const int total = cfg.agent_cfg.prefill_episodes + cfg.episodes;
  const auto flush = [&] {
    log_csv(result.records, result.csv_path);
    write_lines(cfg.out_dir + "/debug.log", debug_lines);
  };

  try {
    for (int ep = 0; ep < total; ++ep) {
      const bool prefill = ep < cfg.agent_cfg.prefill_episodes;
      const auto t0 = Clock::now();
      ObservationMap obs = live.env->reset();
      double ret = 0.0;
      int steps = 0;
      std::optional<double> final_error;
      for (;;) {
        const std::vector<float> action =
            prefill ? random_action(prefill_rng, desc.action_dim)
                    : agent->select_action(obs, agents::ActionMode::explore);
        const envs::StepResult res = live.env->step(action);
        buffer.push(Transition{obs, action, static_cast<float>(res.reward), res.observation,
                               res.done});
        if (!prefill && buffer.size() >= static_cast<std::size_t>(cfg.agent_cfg.batch))
          agent->update(buffer);
        ret += res.reward;
        ++steps;
        if (res.info.goal_error_l1_deg) final_error = res.info.goal_error_l1_deg;
        obs = res.observation;
        if (res.done) break;
      }
      result.records.push_back(
          EpisodeRecord{ep, steps, ret, final_error, seconds_since(t0)});
      char line[160];
      std::snprintf(line, sizeof line, "episode=%d source=%s steps=%d return=%.17g", ep,
                    prefill ? "random_policy" : "agent", steps, ret);
      debug_lines.emplace_back(line);
    }
  } catch (...) {
    flush();  // keep whatever completed before the failure
    throw;
  }

  flush();
  agent->save(result.checkpoint_path);
  return result;
}

EvalResult evaluate_agent(agents::Agent& agent, const std::string& env_name, int episodes,
                          int seeds, std::uint64_t base_seed,
                          const envs::EnvConfig& env_overrides, double hub_delay_s) {
  if (episodes <= 0) throw InvalidCountError("evaluate: episodes must be positive");
  if (seeds <= 0) throw InvalidCountError("evaluate: seeds must be positive");
  const envs::EnvDescriptor desc = envs::descriptor_for(env_name);
  if (agent.action_dim() != desc.action_dim || agent.obs_vec_dim() != desc.vec_dim() ||
      agent.obs_has_image() != desc.has_image)
    throw SpecMismatchError("evaluate: checkpoint does not match environment dimensions");

  EvalResult result;
  long success_count = 0;
  long step_count = 0;
  for (int s = 0; s < seeds; ++s) {
    envs::EnvConfig env_cfg = env_overrides;
    env_cfg.seed = base_seed + static_cast<std::uint64_t>(s);
    LiveEnv live = open_env(env_name, env_cfg, hub_delay_s);
    for (int e = 0; e < episodes; ++e) {
      const auto t0 = Clock::now();
      ObservationMap obs = live.env->reset();
      double ret = 0.0;
      int steps = 0;
      bool success = false;
      std::optional<double> final_error;
      for (;;) {
        const auto action = agent.select_action(obs, agents::ActionMode::eval);
        const envs::StepResult res = live.env->step(action);
        ret += res.reward;
        ++steps;
        success = success || res.info.success;
        if (res.info.goal_error_l1_deg) final_error = res.info.goal_error_l1_deg;
        obs = res.observation;
        if (res.done) break;
      }
      result.returns.push_back(ret);
      result.records.push_back(EpisodeRecord{static_cast<int>(result.records.size()), steps, ret,
                                             final_error, seconds_since(t0)});
      if (success) ++success_count;
      step_count += steps;
    }
  }
  result.episodes = static_cast<int>(result.returns.size());
  double acc = 0.0;
  for (double r : result.returns) acc += r;
  result.mean_return = acc / result.episodes;
  double var = 0.0;
  for (double r : result.returns) var += (r - result.mean_return) * (r - result.mean_return);
  result.stddev_return = std::sqrt(var / result.episodes);
  result.success_rate = static_cast<double>(success_count) / result.episodes;
  result.mean_steps = static_cast<double>(step_count) / result.episodes;
  return result;
}

EvalResult evaluate(const std::string& checkpoint_path, const std::string& env_name, int episodes,
                    int seeds, std::uint64_t base_seed, const envs::EnvConfig& env_overrides,
                    double hub_delay_s) {
  if (episodes <= 0) throw InvalidCountError("evaluate: episodes must be positive");
  if (seeds <= 0) throw InvalidCountError("evaluate: seeds must be positive");
  const auto agent = agents::load_agent(checkpoint_path);
  return evaluate_agent(*agent, env_name, episodes, seeds, base_seed, env_overrides, hub_delay_s);
}

}  // namespace hubrl::harness
