#include "hubrl/agents/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "hubrl/nn/adam.hpp"
#include "hubrl/nn/checkpoint.hpp"
#include "hubrl/nn/gaussian.hpp"
#include "hubrl/nn/mlp.hpp"
#include "hubrl/rng.hpp"

namespace hubrl::agents {

using nn::Matrix;
using nn::Mlp;
using nn::Mode;
using nn::RowVector;
using nn::Vector;

AgentConfig default_config(const std::string& algo) {
  AgentConfig cfg;
  if (algo == "droq") {
    cfg.utd_ratio = 20;
    cfg.dropout = 0.01;
    cfg.normalization = "layernorm";
  } else if (algo != "sac" && algo != "td3" && algo != "random") {
    throw ConfigError("unknown algorithm: " + algo);
  }
  return cfg;
}

void validate_config(const AgentConfig& cfg) {
  if (cfg.lr <= 0) throw ConfigError("lr must be positive");
  if (cfg.batch <= 0) throw ConfigError("batch must be positive");
  if (cfg.utd_ratio <= 0) throw ConfigError("utd_ratio must be positive");
  if (cfg.prefill_episodes < 0) throw ConfigError("prefill_episodes must be non-negative");
  if (cfg.cells <= 0) throw ConfigError("cells must be positive");
  if (cfg.gamma < 0 || cfg.gamma > 1) throw ConfigError("gamma must be in [0, 1]");
  if (cfg.soft_update_eps < 0 || cfg.soft_update_eps > 1)
    throw ConfigError("soft_update_eps must be in [0, 1]");
  if (cfg.normalization != "none" && cfg.normalization != "layernorm")
    throw ConfigError("normalization must be 'none' or 'layernorm'");
  if (cfg.dropout < 0 || cfg.dropout >= 1) throw ConfigError("dropout must be in [0, 1)");
  if (cfg.buffer <= 0) throw ConfigError("buffer must be positive");
  if (cfg.exploration_noise < 0) throw ConfigError("exploration_noise must be non-negative");
  if (cfg.policy_delay <= 0) throw ConfigError("policy_delay must be positive");
}

std::vector<float> encode_mixed_obs(const Tensor& vec, const Tensor& image) {
  if (image.shape.size() != 2 || image.shape[0] != 64 || image.shape[1] != 64)
    throw ShapeMismatchError("encode_mixed_obs: expected a 64x64 image plane");
  std::vector<float> out(vec.data.begin(), vec.data.end());
  out.reserve(vec.data.size() + 256);
  for (int by = 0; by < 16; ++by) {
    for (int bx = 0; bx < 16; ++bx) {
      float acc = 0.0f;
      for (int dy = 0; dy < 4; ++dy)
        for (int dx = 0; dx < 4; ++dx) acc += image.at(by * 4 + dy, bx * 4 + dx);
      out.push_back(acc / 16.0f);
    }
  }
  return out;
}

std::vector<float> encode_obs(const ObservationMap& obs, bool has_image) {
  const Tensor& v = obs_vec(obs);
  if (!has_image) return v.data;
  return encode_mixed_obs(v, obs.at("image"));
}

int encoded_obs_dim(int obs_vec_dim, bool has_image) {
  return obs_vec_dim + (has_image ? 256 : 0);
}

namespace {

constexpr float kMetaAlgoSac = 0.0f;
constexpr float kMetaAlgoTd3 = 1.0f;
constexpr float kMetaAlgoDroq = 2.0f;
constexpr float kMetaAlgoRandom = 3.0f;

struct BatchData {
  Matrix<float> obs, act, next;
  RowVector<float> rew, done;
};

BatchData assemble_batch(const std::vector<const Transition*>& batch, int in_dim, bool has_image,
                         int action_dim) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  BatchData d;
  d.obs.resize(in_dim, b);
  d.next.resize(in_dim, b);
  d.act.resize(action_dim, b);
  d.rew.resize(b);
  d.done.resize(b);
  for (Eigen::Index c = 0; c < b; ++c) {
    const Transition& t = *batch[static_cast<std::size_t>(c)];
    const auto o = encode_obs(t.obs, has_image);
    const auto n = encode_obs(t.next_obs, has_image);
    for (int r = 0; r < in_dim; ++r) {
      d.obs(r, c) = o[static_cast<std::size_t>(r)];
      d.next(r, c) = n[static_cast<std::size_t>(r)];
    }
    for (int r = 0; r < action_dim; ++r) d.act(r, c) = t.action[static_cast<std::size_t>(r)];
    d.rew(c) = t.reward;
    d.done(c) = t.done ? 1.0f : 0.0f;
  }
  return d;
}

Matrix<float> cat_rows(const Matrix<float>& a, const Matrix<float>& b) {
  Matrix<float> out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

// smooth-l1 (huber, beta 1) residual gradient: linear tails keep one bad
// bootstrap target from dominating the whole batch gradient
float huber_grad(float delta) { return std::clamp(delta, -1.0f, 1.0f); }

Matrix<float> obs_column(const ObservationMap& obs, bool has_image) {
  const auto enc = encode_obs(obs, has_image);
  Matrix<float> x(static_cast<Eigen::Index>(enc.size()), 1);
  for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, 0) = enc[static_cast<std::size_t>(r)];
  return x;
}

std::vector<float> column_to_action(const Matrix<float>& a) {
  std::vector<float> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index r = 0; r < a.rows(); ++r) out[static_cast<std::size_t>(r)] = a(r, 0);
  return out;
}

std::vector<float> config_to_floats(const AgentConfig& c) {
  return {static_cast<float>(c.lr),
          static_cast<float>(c.batch),
          static_cast<float>(c.utd_ratio),
          static_cast<float>(c.prefill_episodes),
          static_cast<float>(c.cells),
          static_cast<float>(c.gamma),
          static_cast<float>(c.soft_update_eps),
          static_cast<float>(c.alpha_init),
          c.fixed_alpha ? 1.0f : 0.0f,
          c.normalization == "layernorm" ? 1.0f : 0.0f,
          static_cast<float>(c.dropout),
          static_cast<float>(c.buffer),
          static_cast<float>(c.exploration_noise),
          static_cast<float>(c.target_noise),
          static_cast<float>(c.target_noise_clip),
          static_cast<float>(c.policy_delay)};
}

AgentConfig config_from_floats(const std::vector<float>& f) {
  if (f.size() != 16) throw SpecMismatchError("checkpoint: bad config block size");
  AgentConfig c;
  c.lr = f[0];
  c.batch = static_cast<int>(f[1]);
  c.utd_ratio = static_cast<int>(f[2]);
  c.prefill_episodes = static_cast<int>(f[3]);
  c.cells = static_cast<int>(f[4]);
  c.gamma = f[5];
  c.soft_update_eps = f[6];
  c.alpha_init = f[7];
  c.fixed_alpha = f[8] != 0.0f;
  c.normalization = f[9] != 0.0f ? "layernorm" : "none";
  c.dropout = f[10];
  c.buffer = static_cast<long>(f[11]);
  c.exploration_noise = f[12];
  c.target_noise = f[13];
  c.target_noise_clip = f[14];
  c.policy_delay = static_cast<int>(f[15]);
  return c;
}

void append_net(std::vector<nn::NamedArray>& arrays, const std::string& name,
                const Mlp<float>& net) {
  const auto& cfg = net.config();
  std::vector<float> layout = {static_cast<float>(cfg.input), static_cast<float>(cfg.output),
                               cfg.layer_norm ? 1.0f : 0.0f, static_cast<float>(cfg.dropout)};
  for (int h : cfg.hidden) layout.push_back(static_cast<float>(h));
  arrays.push_back({name + "/layout", {static_cast<std::uint32_t>(layout.size())}, layout});
  std::vector<float> theta(static_cast<std::size_t>(net.param_count()));
  Eigen::Map<Vector<float>>(theta.data(), net.param_count()) = net.params();
  arrays.push_back({name + "/theta", {static_cast<std::uint32_t>(theta.size())}, theta});
}

Mlp<float> net_from_arrays(const std::vector<nn::NamedArray>& arrays, const std::string& name) {
  const auto& layout = nn::find_array(arrays, name + "/layout").data;
  if (layout.size() < 4) throw SpecMismatchError("checkpoint: bad net layout: " + name);
  nn::MlpConfig cfg;
  cfg.input = static_cast<int>(layout[0]);
  cfg.output = static_cast<int>(layout[1]);
  cfg.layer_norm = layout[2] != 0.0f;
  cfg.dropout = layout[3];
  cfg.hidden.clear();
  for (std::size_t i = 4; i < layout.size(); ++i) cfg.hidden.push_back(static_cast<int>(layout[i]));
  SeededRng scratch(0);
  Mlp<float> net(cfg, scratch);
  const auto& theta = nn::find_array(arrays, name + "/theta").data;
  if (static_cast<int>(theta.size()) != net.param_count())
    throw SpecMismatchError("checkpoint: theta size mismatch: " + name);
  net.params() = Eigen::Map<const Vector<float>>(theta.data(), net.param_count());
  return net;
}

std::vector<nn::NamedArray> meta_arrays(float algo_code, const AgentConfig& cfg, int obs_vec_dim,
                                        bool has_image, int action_dim) {
  std::vector<nn::NamedArray> arrays;
  arrays.push_back({"meta/algo", {1}, {algo_code}});
  arrays.push_back({"meta/dims",
                    {3},
                    {static_cast<float>(obs_vec_dim), has_image ? 1.0f : 0.0f,
                     static_cast<float>(action_dim)}});
  const auto cf = config_to_floats(cfg);
  arrays.push_back({"meta/config", {static_cast<std::uint32_t>(cf.size())}, cf});
  return arrays;
}

// ---------------------------------------------------------------------------
// maximum-entropy learner (twin critics, tanh-Gaussian actor, learned
// temperature). The high update-to-data variant with critic dropout and
// layernorm is the same machinery under a different config, so one class
// serves both; with utd 1, dropout 0 and no layernorm the two configurations
// run bit-identical update paths.

class SacAgent final : public Agent {
 public:
  SacAgent(std::string algo, const AgentConfig& cfg, int obs_vec_dim, bool has_image,
           int action_dim, std::uint64_t seed)
      : algo_(std::move(algo)), cfg_(cfg), obs_vec_dim_(obs_vec_dim), has_image_(has_image),
        action_dim_(action_dim), in_dim_(encoded_obs_dim(obs_vec_dim, has_image)),
        init_rng_(SeededRng(seed).fork("agent/init")),
        explore_rng_(SeededRng(seed).fork("agent/explore")),
        update_rng_(SeededRng(seed).fork("agent/update")),
        replay_rng_(SeededRng(seed).fork("agent/replay")),
        actor_(actor_cfg(), init_rng_), q1_(critic_cfg(), init_rng_), q2_(critic_cfg(), init_rng_),
        q1t_(q1_), q2t_(q2_),
        adam_actor_(actor_.param_count(), static_cast<float>(cfg.lr)),
        adam_q1_(q1_.param_count(), static_cast<float>(cfg.lr)),
        adam_q2_(q2_.param_count(), static_cast<float>(cfg.lr)),
        adam_alpha_(1, static_cast<float>(cfg.lr)) {
    validate_config(cfg_);
    log_alpha_ = Vector<float>::Constant(1, std::log(static_cast<float>(cfg_.alpha_init)));
    target_entropy_ = -static_cast<float>(action_dim_);
  }

  const std::string& algo() const override { return algo_; }
  const AgentConfig& config() const override { return cfg_; }
  int action_dim() const override { return action_dim_; }
  int obs_vec_dim() const override { return obs_vec_dim_; }
  bool obs_has_image() const override { return has_image_; }
  long critic_updates() const override { return critic_updates_; }
  long actor_updates() const override { return actor_updates_; }

  std::vector<float> select_action(const ObservationMap& obs, ActionMode mode) override {
    const Matrix<float> x = obs_column(obs, has_image_);
    const Matrix<float> out = actor_.forward(x, Mode::eval);
    const Matrix<float> mean = out.topRows(action_dim_);
    if (mode == ActionMode::eval) return column_to_action(nn::squashed_mean(mean));
    const Matrix<float> log_std = out.bottomRows(action_dim_);
    const auto s = nn::sample_squashed_gaussian(mean, log_std, explore_rng_);
    return column_to_action(s.action);
  }

  void update(ReplayBuffer& buffer) override {
    const float alpha = std::exp(log_alpha_(0));
    BatchData last;
    for (int rep = 0; rep < cfg_.utd_ratio; ++rep) {
      last = assemble_batch(buffer.sample(static_cast<std::size_t>(cfg_.batch), replay_rng_),
                            in_dim_, has_image_, action_dim_);
      critic_step(last, alpha);
      nn::soft_update(q1t_.params(), q1_.params(), static_cast<float>(cfg_.soft_update_eps));
      nn::soft_update(q2t_.params(), q2_.params(), static_cast<float>(cfg_.soft_update_eps));
    }
    actor_step(last, alpha);
  }

  void save(const std::string& path) const override {
    auto arrays = meta_arrays(algo_ == "droq" ? kMetaAlgoDroq : kMetaAlgoSac, cfg_, obs_vec_dim_,
                              has_image_, action_dim_);
    append_net(arrays, "actor", actor_);
    append_net(arrays, "q1", q1_);
    append_net(arrays, "q2", q2_);
    append_net(arrays, "q1_target", q1t_);
    append_net(arrays, "q2_target", q2t_);
    arrays.push_back({"alpha/log_alpha", {1}, {log_alpha_(0)}});
    nn::write_checkpoint(path, arrays);
  }

  void restore(const std::vector<nn::NamedArray>& arrays) {
    actor_ = net_from_arrays(arrays, "actor");
    q1_ = net_from_arrays(arrays, "q1");
    q2_ = net_from_arrays(arrays, "q2");
    q1t_ = net_from_arrays(arrays, "q1_target");
    q2t_ = net_from_arrays(arrays, "q2_target");
    log_alpha_(0) = nn::find_array(arrays, "alpha/log_alpha").data.at(0);
  }

 private:
  nn::MlpConfig actor_cfg() const {
    return {in_dim_, 2 * action_dim_, {cfg_.cells, cfg_.cells}, false, 0.0};
  }
  nn::MlpConfig critic_cfg() const {
    return {in_dim_ + action_dim_, 1, {cfg_.cells, cfg_.cells},
            cfg_.normalization == "layernorm", cfg_.dropout};
  }

  void critic_step(const BatchData& d, float alpha) {
    const auto b = d.obs.cols();
    // bootstrap target from the current policy at the next state
    const Matrix<float> nxt_out = actor_.forward(d.next, Mode::eval);
    const auto s = nn::sample_squashed_gaussian(
        Matrix<float>(nxt_out.topRows(action_dim_)),
        Matrix<float>(nxt_out.bottomRows(action_dim_)), update_rng_);
    const Matrix<float> next_in = cat_rows(d.next, s.action);
    const Matrix<float> q1n = q1t_.forward(next_in, Mode::train, &update_rng_);
    const Matrix<float> q2n = q2t_.forward(next_in, Mode::train, &update_rng_);
    RowVector<float> y(b);
    for (Eigen::Index c = 0; c < b; ++c) {
      const float qmin = std::min(q1n(0, c), q2n(0, c));
      y(c) = d.rew(c) +
             static_cast<float>(cfg_.gamma) * (1.0f - d.done(c)) * (qmin - alpha * s.log_prob(c));
    }
    const Matrix<float> in = cat_rows(d.obs, d.act);
    const float inv_b = 1.0f / static_cast<float>(b);
    for (auto* net : {&q1_, &q2_}) {
      auto& adam = net == &q1_ ? adam_q1_ : adam_q2_;
      typename Mlp<float>::Cache cache;
      const Matrix<float> q = net->forward(in, Mode::train, &update_rng_, &cache);
      Matrix<float> dy(1, b);
      for (Eigen::Index c = 0; c < b; ++c) dy(0, c) = huber_grad(q(0, c) - y(c)) * inv_b;
      const Vector<float> grads = net->backward(cache, dy);
      adam.step(net->params(), grads);
    }
    ++critic_updates_;
  }

  void actor_step(const BatchData& d, float alpha) {
    const auto b = d.obs.cols();
    const float inv_b = 1.0f / static_cast<float>(b);
    typename Mlp<float>::Cache actor_cache;
    const Matrix<float> out = actor_.forward(d.obs, Mode::eval, nullptr, &actor_cache);
    const auto s = nn::sample_squashed_gaussian(Matrix<float>(out.topRows(action_dim_)),
                                                Matrix<float>(out.bottomRows(action_dim_)),
                                                update_rng_);
    const Matrix<float> in = cat_rows(d.obs, s.action);
    typename Mlp<float>::Cache c1, c2;
    const Matrix<float> q1v = q1_.forward(in, Mode::train, &update_rng_, &c1);
    const Matrix<float> q2v = q2_.forward(in, Mode::train, &update_rng_, &c2);
    // route -dQmin/da through whichever critic is the columnwise minimum
    Matrix<float> dy1 = Matrix<float>::Zero(1, b);
    Matrix<float> dy2 = Matrix<float>::Zero(1, b);
    for (Eigen::Index c = 0; c < b; ++c)
      (q1v(0, c) <= q2v(0, c) ? dy1 : dy2)(0, c) = -inv_b;
    Matrix<float> dx1, dx2;
    q1_.backward(c1, dy1, &dx1);
    q2_.backward(c2, dy2, &dx2);
    const Matrix<float> g = dx1.bottomRows(action_dim_) + dx2.bottomRows(action_dim_);
    // reparameterized gradients: pre = mean + sigma*z, a = tanh(pre),
    // u = 1 - a^2; d logpi / d pre = 2a; the -log sigma term adds -1 on the
    // log_std rows.
    Matrix<float> dout(2 * action_dim_, b);
    for (Eigen::Index c = 0; c < b; ++c) {
      for (int r = 0; r < action_dim_; ++r) {
        const float a = s.action(r, c);
        const float u = 1.0f - a * a;
        const float sz = s.sigma(r, c) * s.z(r, c);
        const float dpre = alpha * inv_b * 2.0f * a + g(r, c) * u;
        dout(r, c) = dpre;
        dout(action_dim_ + r, c) = (dpre * sz - alpha * inv_b) * s.clamp_pass(r, c);
      }
    }
    const Vector<float> agrads = actor_.backward(actor_cache, dout);
    adam_actor_.step(actor_.params(), agrads);
    if (!cfg_.fixed_alpha) {
      float mean_lp = 0.0f;
      for (Eigen::Index c = 0; c < b; ++c) mean_lp += s.log_prob(c);
      mean_lp *= inv_b;
      Vector<float> galpha(1);
      galpha(0) = -(mean_lp + target_entropy_);
      adam_alpha_.step(log_alpha_, galpha);
    }
    ++actor_updates_;
  }

  std::string algo_;
  AgentConfig cfg_;
  int obs_vec_dim_;
  bool has_image_;
  int action_dim_;
  int in_dim_;
  SeededRng init_rng_, explore_rng_, update_rng_, replay_rng_;
  Mlp<float> actor_, q1_, q2_, q1t_, q2t_;
  nn::Adam<float> adam_actor_, adam_q1_, adam_q2_, adam_alpha_;
  Vector<float> log_alpha_;
  float target_entropy_ = 0.0f;
  long critic_updates_ = 0;
  long actor_updates_ = 0;
};

// ---------------------------------------------------------------------------
// twin-delayed deterministic-policy learner

class Td3Agent final : public Agent {
 public:
  Td3Agent(const AgentConfig& cfg, int obs_vec_dim, bool has_image, int action_dim,
           std::uint64_t seed)
      : cfg_(cfg), obs_vec_dim_(obs_vec_dim), has_image_(has_image), action_dim_(action_dim),
        in_dim_(encoded_obs_dim(obs_vec_dim, has_image)),
        init_rng_(SeededRng(seed).fork("agent/init")),
        explore_rng_(SeededRng(seed).fork("agent/explore")),
        update_rng_(SeededRng(seed).fork("agent/update")),
        replay_rng_(SeededRng(seed).fork("agent/replay")),
        actor_(actor_cfg(), init_rng_), q1_(critic_cfg(), init_rng_), q2_(critic_cfg(), init_rng_),
        actor_t_(actor_), q1t_(q1_), q2t_(q2_),
        adam_actor_(actor_.param_count(), static_cast<float>(cfg.lr)),
        adam_q1_(q1_.param_count(), static_cast<float>(cfg.lr)),
        adam_q2_(q2_.param_count(), static_cast<float>(cfg.lr)) {
    validate_config(cfg_);
  }

  const std::string& algo() const override { return algo_; }
  const AgentConfig& config() const override { return cfg_; }
  int action_dim() const override { return action_dim_; }
  int obs_vec_dim() const override { return obs_vec_dim_; }
  bool obs_has_image() const override { return has_image_; }
  long critic_updates() const override { return critic_updates_; }
  long actor_updates() const override { return actor_updates_; }

  std::vector<float> select_action(const ObservationMap& obs, ActionMode mode) override {
    const Matrix<float> x = obs_column(obs, has_image_);
    Matrix<float> a = actor_.forward(x, Mode::eval).array().tanh().matrix();
    if (mode == ActionMode::explore) {
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        const float noisy =
            a(r, 0) + static_cast<float>(cfg_.exploration_noise * explore_rng_.normal());
        a(r, 0) = std::clamp(noisy, -1.0f, 1.0f);
      }
    }
    return column_to_action(a);
  }

  void update(ReplayBuffer& buffer) override {
    for (int rep = 0; rep < cfg_.utd_ratio; ++rep) {
      const BatchData d =
          assemble_batch(buffer.sample(static_cast<std::size_t>(cfg_.batch), replay_rng_), in_dim_,
                         has_image_, action_dim_);
      critic_step(d);
      if (critic_updates_ % cfg_.policy_delay == 0) {
        actor_step(d);
        nn::soft_update(actor_t_.params(), actor_.params(),
                        static_cast<float>(cfg_.soft_update_eps));
        nn::soft_update(q1t_.params(), q1_.params(), static_cast<float>(cfg_.soft_update_eps));
        nn::soft_update(q2t_.params(), q2_.params(), static_cast<float>(cfg_.soft_update_eps));
      }
    }
  }

  void save(const std::string& path) const override {
    auto arrays = meta_arrays(kMetaAlgoTd3, cfg_, obs_vec_dim_, has_image_, action_dim_);
    append_net(arrays, "actor", actor_);
    append_net(arrays, "actor_target", actor_t_);
    append_net(arrays, "q1", q1_);
    append_net(arrays, "q2", q2_);
    append_net(arrays, "q1_target", q1t_);
    append_net(arrays, "q2_target", q2t_);
    nn::write_checkpoint(path, arrays);
  }

  void restore(const std::vector<nn::NamedArray>& arrays) {
    actor_ = net_from_arrays(arrays, "actor");
    actor_t_ = net_from_arrays(arrays, "actor_target");
    q1_ = net_from_arrays(arrays, "q1");
    q2_ = net_from_arrays(arrays, "q2");
    q1t_ = net_from_arrays(arrays, "q1_target");
    q2t_ = net_from_arrays(arrays, "q2_target");
  }

 private:
  nn::MlpConfig actor_cfg() const {
    return {in_dim_, action_dim_, {cfg_.cells, cfg_.cells}, false, 0.0};
  }
  nn::MlpConfig critic_cfg() const {
    return {in_dim_ + action_dim_, 1, {cfg_.cells, cfg_.cells},
            cfg_.normalization == "layernorm", cfg_.dropout};
  }

  void critic_step(const BatchData& d) {
    const auto b = d.obs.cols();
    // smoothed target action: tanh(target actor) + clipped noise, clipped to bounds
    Matrix<float> an = actor_t_.forward(d.next, Mode::eval).array().tanh().matrix();
    const auto clip = static_cast<float>(cfg_.target_noise_clip);
    for (Eigen::Index c = 0; c < b; ++c)
      for (Eigen::Index r = 0; r < an.rows(); ++r) {
        const float eps = std::clamp(
            static_cast<float>(cfg_.target_noise * update_rng_.normal()), -clip, clip);
        an(r, c) = std::clamp(an(r, c) + eps, -1.0f, 1.0f);
      }
    const Matrix<float> next_in = cat_rows(d.next, an);
    const Matrix<float> q1n = q1t_.forward(next_in, Mode::train, &update_rng_);
    const Matrix<float> q2n = q2t_.forward(next_in, Mode::train, &update_rng_);
    RowVector<float> y(b);
    for (Eigen::Index c = 0; c < b; ++c)
      y(c) = d.rew(c) + static_cast<float>(cfg_.gamma) * (1.0f - d.done(c)) *
                            std::min(q1n(0, c), q2n(0, c));
    const Matrix<float> in = cat_rows(d.obs, d.act);
    const float inv_b = 1.0f / static_cast<float>(b);
    for (auto* net : {&q1_, &q2_}) {
      auto& adam = net == &q1_ ? adam_q1_ : adam_q2_;
      typename Mlp<float>::Cache cache;
      const Matrix<float> q = net->forward(in, Mode::train, &update_rng_, &cache);
      Matrix<float> dy(1, b);
      for (Eigen::Index c = 0; c < b; ++c) dy(0, c) = huber_grad(q(0, c) - y(c)) * inv_b;
      const Vector<float> grads = net->backward(cache, dy);
      adam.step(net->params(), grads);
    }
    ++critic_updates_;
  }

  void actor_step(const BatchData& d) {
    const auto b = d.obs.cols();
    const float inv_b = 1.0f / static_cast<float>(b);
    typename Mlp<float>::Cache actor_cache;
    const Matrix<float> pre = actor_.forward(d.obs, Mode::eval, nullptr, &actor_cache);
    const Matrix<float> a = pre.array().tanh().matrix();
    const Matrix<float> in = cat_rows(d.obs, a);
    typename Mlp<float>::Cache c1;
    q1_.forward(in, Mode::train, &update_rng_, &c1);
    Matrix<float> dy = Matrix<float>::Constant(1, b, -inv_b);  // maximize mean q1
    Matrix<float> dx;
    q1_.backward(c1, dy, &dx);
    const Matrix<float> g = dx.bottomRows(action_dim_);
    const Matrix<float> dpre =
        (g.array() * (1.0f - a.array().square())).matrix();  // through tanh
    const Vector<float> agrads = actor_.backward(actor_cache, dpre);
    adam_actor_.step(actor_.params(), agrads);
    ++actor_updates_;
  }

  std::string algo_ = "td3";
  AgentConfig cfg_;
  int obs_vec_dim_;
  bool has_image_;
  int action_dim_;
  int in_dim_;
  SeededRng init_rng_, explore_rng_, update_rng_, replay_rng_;
  Mlp<float> actor_, q1_, q2_, actor_t_, q1t_, q2t_;
  nn::Adam<float> adam_actor_, adam_q1_, adam_q2_;
  long critic_updates_ = 0;
  long actor_updates_ = 0;
};

// ---------------------------------------------------------------------------

class RandomAgent final : public Agent {
 public:
  RandomAgent(const AgentConfig& cfg, int obs_vec_dim, bool has_image, int action_dim,
              std::uint64_t seed)
      : cfg_(cfg), obs_vec_dim_(obs_vec_dim), has_image_(has_image), action_dim_(action_dim),
        rng_(SeededRng(seed).fork("agent/explore")) {}

  const std::string& algo() const override { return algo_; }
  const AgentConfig& config() const override { return cfg_; }
  int action_dim() const override { return action_dim_; }
  int obs_vec_dim() const override { return obs_vec_dim_; }
  bool obs_has_image() const override { return has_image_; }

  std::vector<float> select_action(const ObservationMap&, ActionMode) override {
    std::vector<float> a(static_cast<std::size_t>(action_dim_));
    for (auto& v : a) v = static_cast<float>(rng_.uniform(-1.0, 1.0));
    return a;
  }

  void update(ReplayBuffer&) override {}

  void save(const std::string& path) const override {
    nn::write_checkpoint(path,
                         meta_arrays(kMetaAlgoRandom, cfg_, obs_vec_dim_, has_image_, action_dim_));
  }

 private:
  std::string algo_ = "random";
  AgentConfig cfg_;
  int obs_vec_dim_;
  bool has_image_;
  int action_dim_;
  SeededRng rng_;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const std::string& algo, const AgentConfig& cfg,
                                  int obs_vec_dim, bool has_image, int action_dim,
                                  std::uint64_t seed) {
  if (action_dim <= 0 || obs_vec_dim <= 0) throw ConfigError("make_agent: bad dimensions");
  if (algo == "sac" || algo == "droq")
    return std::make_unique<SacAgent>(algo, cfg, obs_vec_dim, has_image, action_dim, seed);
  if (algo == "td3") return std::make_unique<Td3Agent>(cfg, obs_vec_dim, has_image, action_dim, seed);
  if (algo == "random")
    return std::make_unique<RandomAgent>(cfg, obs_vec_dim, has_image, action_dim, seed);
  throw ConfigError("unknown algorithm: " + algo);
}

std::unique_ptr<Agent> load_agent(const std::string& path) {
  const auto arrays = nn::read_checkpoint(path);
  const float code = nn::find_array(arrays, "meta/algo").data.at(0);
  const auto& dims = nn::find_array(arrays, "meta/dims").data;
  if (dims.size() != 3) throw SpecMismatchError("checkpoint: bad meta/dims");
  const AgentConfig cfg = config_from_floats(nn::find_array(arrays, "meta/config").data);
  const int obs_vec_dim = static_cast<int>(dims[0]);
  const bool has_image = dims[1] != 0.0f;
  const int action_dim = static_cast<int>(dims[2]);
  if (code == kMetaAlgoSac || code == kMetaAlgoDroq) {
    auto agent = std::make_unique<SacAgent>(code == kMetaAlgoDroq ? "droq" : "sac", cfg,
                                            obs_vec_dim, has_image, action_dim, 0);
    agent->restore(arrays);
    return agent;
  }
  if (code == kMetaAlgoTd3) {
    auto agent = std::make_unique<Td3Agent>(cfg, obs_vec_dim, has_image, action_dim, 0);
    agent->restore(arrays);
    return agent;
  }
  if (code == kMetaAlgoRandom)
    return std::make_unique<RandomAgent>(cfg, obs_vec_dim, has_image, action_dim, 0);
  throw SpecMismatchError("checkpoint: unknown algorithm code");
}

}  // namespace hubrl::agents
