#include "hubrl/harness/run_config.hpp"

#include <algorithm>
#include <fstream>

#include "hubrl/errors.hpp"

namespace hubrl::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) throw ConfigError("expected integer for " + key + ": '" + v + "'");
  return i;
}

long to_long(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  const long i = static_cast<long>(d);
  if (static_cast<double>(i) != d) throw ConfigError("expected integer for " + key + ": '" + v + "'");
  return i;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto u = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw ConfigError("bad seed value for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  // run-level keys
  if (key == "env") {
    cfg.env = value;
  } else if (key == "agent") {
    cfg.agent = value;  // defaults already resolved by the caller
  } else if (key == "episodes") {
    cfg.episodes = to_int(key, value);
  } else if (key == "seed") {
    cfg.seed = to_u64(key, value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "hub_delay") {
    cfg.hub_delay_s = to_double(key, value);
  } else if (key == "eval_episodes") {
    cfg.eval_episodes = to_int(key, value);
  } else if (key == "eval_seeds") {
    cfg.eval_seeds = to_int(key, value);
    // learner keys (AgentConfig field names)
  } else if (key == "lr") {
    cfg.agent_cfg.lr = to_double(key, value);
  } else if (key == "batch") {
    cfg.agent_cfg.batch = to_int(key, value);
  } else if (key == "utd_ratio") {
    cfg.agent_cfg.utd_ratio = to_int(key, value);
  } else if (key == "prefill_episodes") {
    cfg.agent_cfg.prefill_episodes = to_int(key, value);
  } else if (key == "cells") {
    cfg.agent_cfg.cells = to_int(key, value);
  } else if (key == "gamma") {
    cfg.agent_cfg.gamma = to_double(key, value);
  } else if (key == "soft_update_eps") {
    cfg.agent_cfg.soft_update_eps = to_double(key, value);
  } else if (key == "alpha_init") {
    cfg.agent_cfg.alpha_init = to_double(key, value);
  } else if (key == "fixed_alpha") {
    cfg.agent_cfg.fixed_alpha = to_bool(key, value);
  } else if (key == "normalization") {
    cfg.agent_cfg.normalization = value;
  } else if (key == "dropout") {
    cfg.agent_cfg.dropout = to_double(key, value);
  } else if (key == "buffer") {
    cfg.agent_cfg.buffer = to_long(key, value);
  } else if (key == "exploration_noise") {
    cfg.agent_cfg.exploration_noise = to_double(key, value);
  } else if (key == "target_noise") {
    cfg.agent_cfg.target_noise = to_double(key, value);
  } else if (key == "target_noise_clip") {
    cfg.agent_cfg.target_noise_clip = to_double(key, value);
  } else if (key == "policy_delay") {
    cfg.agent_cfg.policy_delay = to_int(key, value);
    // environment override keys
  } else if (key == "step_interval") {
    cfg.env_cfg.step_interval_s = to_double(key, value);
  } else if (key == "success_threshold") {
    cfg.env_cfg.success_threshold_deg = to_double(key, value);
  } else if (key == "reward_mode") {
    cfg.env_cfg.reward_mode = value;
  } else if (key == "noise") {
    cfg.env_cfg.noise_enabled = to_bool(key, value);
  } else if (key == "transport_timeout") {
    cfg.env_cfg.transport_timeout_s = to_double(key, value);
  } else if (key == "walker_halt_threshold") {
    cfg.env_cfg.walker_halt_threshold_mm = to_double(key, value);
  } else if (key == "action_penalty_abs") {
    cfg.env_cfg.action_penalty_abs = to_bool(key, value);
  } else if (key == "backend") {
    if (value == "transport")
      cfg.env_cfg.backend = envs::Backend::transport;
    else if (value == "simulation")
      cfg.env_cfg.backend = envs::Backend::simulation;
    else
      throw ConfigError("backend must be 'transport' or 'simulation', got '" + value + "'");
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

}  // namespace

KvPairs load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  KvPairs pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not key = value: '" + t +
                        "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key on config line " + std::to_string(lineno));
    pairs.emplace_back(key, value);
  }
  return pairs;
}

RunConfig build_run_config(const KvPairs& file_pairs, const KvPairs& cli_pairs) {
  // the agent name decides the hyperparameter defaults, so resolve it first
  std::string agent = "sac";
  for (const auto& [k, v] : file_pairs)
    if (k == "agent") agent = v;
  for (const auto& [k, v] : cli_pairs)
    if (k == "agent") agent = v;
  RunConfig cfg;
  cfg.agent = agent;
  cfg.agent_cfg = agents::default_config(agent);
  for (const auto& [k, v] : file_pairs) apply_key(cfg, k, v);
  for (const auto& [k, v] : cli_pairs) apply_key(cfg, k, v);
  return cfg;
}

}  // namespace hubrl::harness
