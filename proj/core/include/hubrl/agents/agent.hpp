#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hubrl/agents/config.hpp"
#include "hubrl/replay_buffer.hpp"
#include "hubrl/types.hpp"

namespace hubrl::agents {

enum class ActionMode { explore, eval };

// A learning policy: maps observations to raw [-1, 1] actions and improves
// itself from replayed transitions. One update() call performs the full
// per-environment-step update cycle (utd_ratio critic updates plus whatever
// actor/temperature updates the algorithm schedules).
class Agent {
 public:
  virtual ~Agent() = default;

  virtual const std::string& algo() const = 0;
  virtual const AgentConfig& config() const = 0;
  virtual int action_dim() const = 0;
  virtual int obs_vec_dim() const = 0;
  virtual bool obs_has_image() const = 0;

  virtual std::vector<float> select_action(const ObservationMap& obs, ActionMode mode) = 0;
  virtual void update(ReplayBuffer& buffer) = 0;

  virtual long critic_updates() const { return 0; }
  virtual long actor_updates() const { return 0; }

  virtual void save(const std::string& path) const = 0;
};

// Camera observations are folded to a fixed-size vector: the raw vector
// channels followed by a 4x4-average-pooled 16x16 thumbnail of the 64x64
// image plane, flattened row-major (vec_dim + 256 inputs).
std::vector<float> encode_mixed_obs(const Tensor& vec, const Tensor& image);
std::vector<float> encode_obs(const ObservationMap& obs, bool has_image);
int encoded_obs_dim(int obs_vec_dim, bool has_image);

// algo: "sac" | "td3" | "droq" | "random". The config is used as given;
// callers wanting per-algo defaults start from default_config(algo).
std::unique_ptr<Agent> make_agent(const std::string& algo, const AgentConfig& cfg,
                                  int obs_vec_dim, bool has_image, int action_dim,
                                  std::uint64_t seed);

// Rebuild an agent from a snapshot written by Agent::save.
std::unique_ptr<Agent> load_agent(const std::string& path);

}  // namespace hubrl::agents
