#include <benchmark/benchmark.h>

#include <vector>

#include "hubrl/agents/agent.hpp"
#include "hubrl/dynamics/motor.hpp"
#include "hubrl/nn/mlp.hpp"
#include "hubrl/replay_buffer.hpp"
#include "hubrl/rng.hpp"
#include "hubrl/vision/vision.hpp"
#include "hubrl/wire/frame.hpp"

using namespace hubrl;

static void BM_frame_codec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng(1);
  std::vector<float> values(n);
  for (auto& v : values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (auto _ : state) {
    const wire::Frame f = wire::encode_frame(values);
    benchmark::DoNotOptimize(wire::decode_frame(f.payload, n));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<long>(n) * 4);
}
BENCHMARK(BM_frame_codec)->Arg(4)->Arg(7);

static void BM_mlp_forward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  SeededRng rng(2);
  nn::MlpConfig cfg;
  cfg.input = 11;
  cfg.output = 1;
  const nn::Mlp<float> net(cfg, rng);
  nn::Matrix<float> x(cfg.input, batch);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, nn::Mode::eval));
}
BENCHMARK(BM_mlp_forward)->Arg(1)->Arg(256);

static void BM_mlp_backward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  SeededRng rng(3);
  nn::MlpConfig cfg;
  cfg.input = 11;
  cfg.output = 1;
  const nn::Mlp<float> net(cfg, rng);
  nn::Matrix<float> x(cfg.input, batch);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  const nn::Matrix<float> dy = nn::Matrix<float>::Ones(1, batch);
  for (auto _ : state) {
    nn::Mlp<float>::Cache cache;
    (void)net.forward(x, nn::Mode::train, &rng, &cache);
    benchmark::DoNotOptimize(net.backward(cache, dy));
  }
}
BENCHMARK(BM_mlp_backward)->Arg(256);

static void BM_walker_sim_step(benchmark::State& state) {
  SeededRng rng(4);
  dynamics::MotorState s = dynamics::walker_reset();
  const float action[] = {-0.3f, 0.7f, -0.9f, 0.1f};
  for (auto _ : state) {
    s = dynamics::walker_sim_step(s, action, rng);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_walker_sim_step);

static void BM_replay_sample(benchmark::State& state) {
  ReplayBuffer buf(100000);
  SeededRng rng(5);
  for (int i = 0; i < 100000; ++i) {
    Transition t;
    std::vector<float> o(7), no(7), a(4);
    for (auto& x : o) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (auto& x : no) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (auto& x : a) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    t.obs = {{"vec", Tensor::vec(std::move(o))}};
    t.next_obs = {{"vec", Tensor::vec(std::move(no))}};
    t.action = std::move(a);
    buf.push(std::move(t));
  }
  for (auto _ : state) benchmark::DoNotOptimize(buf.sample(256, rng));
}
BENCHMARK(BM_replay_sample);

static void BM_sac_update(benchmark::State& state) {
  agents::AgentConfig cfg = agents::default_config("sac");
  auto agent = agents::make_agent("sac", cfg, 7, false, 4, 6);
  ReplayBuffer buf(static_cast<std::size_t>(cfg.buffer));
  SeededRng rng(7);
  for (int i = 0; i < 2000; ++i) {
    Transition t;
    std::vector<float> o(7), no(7), a(4);
    for (auto& x : o) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (auto& x : no) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (auto& x : a) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    t.obs = {{"vec", Tensor::vec(std::move(o))}};
    t.next_obs = {{"vec", Tensor::vec(std::move(no))}};
    t.action = std::move(a);
    t.reward = static_cast<float>(rng.uniform(-2.0, 0.0));
    buf.push(std::move(t));
  }
  for (auto _ : state) agent->update(buf);
}
BENCHMARK(BM_sac_update);

static void BM_scene_detect(benchmark::State& state) {
  const vision::GoalCircle goal{40, 24, 5};
  const auto range = vision::default_red_range();
  for (auto _ : state) {
    const vision::RgbImage img = vision::render_scene(20, 33, goal);
    benchmark::DoNotOptimize(vision::detect_red_components(img, range));
  }
}
BENCHMARK(BM_scene_detect);

BENCHMARK_MAIN();
