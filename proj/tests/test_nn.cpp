#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "hubrl/errors.hpp"
#include "hubrl/nn/adam.hpp"
#include "hubrl/nn/checkpoint.hpp"
#include "hubrl/nn/gaussian.hpp"
#include "hubrl/nn/mlp.hpp"
#include "hubrl/rng.hpp"

using namespace hubrl;
using namespace hubrl::nn;

// ---------------------------------------------------------------- mlp basics

TEST_CASE("parameter layout and count") {
  SeededRng rng(1);
  MlpConfig plain{3, 2, {4}, false, 0.0};
  Mlp<float> net(plain, rng);
  CHECK(net.param_count() == 3 * 4 + 4 + 4 * 2 + 2);  // 26
  CHECK(net.layer_sizes() == std::vector<int>{3, 4, 2});

  MlpConfig normed{3, 2, {4}, true, 0.0};
  Mlp<float> net2(normed, rng);
  CHECK(net2.param_count() == 26 + 4 + 4);  // gain+bias on the hidden layer only
}

TEST_CASE("initialization follows the fan-in rule") {
  SeededRng rng(2);
  MlpConfig cfg{16, 8, {32, 32}, true, 0.0};
  Mlp<double> net(cfg, rng);

  const double k0 = 1.0 / std::sqrt(16.0);
  for (int i = 0; i < 16 * 32; ++i) {
    CHECK(std::abs(net.w(0).data()[i]) <= k0);
  }
  for (int i = 0; i < 32; ++i) CHECK(std::abs(net.b(0)[i]) <= k0);
  // layernorm starts as the identity transform
  for (int i = 0; i < 32; ++i) {
    CHECK(net.gamma(0)[i] == 1.0);
    CHECK(net.beta(0)[i] == 0.0);
  }

  // identical seeds, identical nets
  SeededRng ra(7), rb(7);
  Mlp<double> na(cfg, ra), nb(cfg, rb);
  CHECK((na.params() - nb.params()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a linear net computes exactly W x + b") {
  SeededRng rng(3);
  MlpConfig cfg{2, 2, {}, false, 0.0};
  Mlp<double> net(cfg, rng);
  REQUIRE(net.param_count() == 6);
  // flat layout: weight column-major, then bias
  net.params() << 1.0, 3.0, 2.0, 4.0, 0.5, -0.5;  // W = [[1,2],[3,4]]
  Matrix<double> x(2, 1);
  x << 1.0, 1.0;
  const Matrix<double> y = net.forward(x, Mode::eval);
  CHECK(y(0, 0) == doctest::Approx(3.5));
  CHECK(y(1, 0) == doctest::Approx(6.5));
}

TEST_CASE("the rectifier gates hidden units") {
  SeededRng rng(4);
  MlpConfig cfg{1, 1, {1}, false, 0.0};
  Mlp<double> net(cfg, rng);
  net.params() << 1.0, -5.0, 1.0, 0.0;  // hidden = relu(x - 5); out = hidden
  Matrix<double> x(1, 2);
  x << 3.0, 7.0;
  const Matrix<double> y = net.forward(x, Mode::eval);
  CHECK(y(0, 0) == doctest::Approx(0.0));
  CHECK(y(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("zeroed parameters give a zero output") {
  SeededRng rng(5);
  MlpConfig cfg{4, 3, {8, 8}, false, 0.0};
  Mlp<float> net(cfg, rng);
  net.params().setZero();
  Matrix<float> x = Matrix<float>::Random(4, 5);
  CHECK(net.forward(x, Mode::eval).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("batched forward equals per-column forward") {
  SeededRng rng(6);
  MlpConfig cfg{5, 3, {16, 16}, true, 0.0};
  Mlp<double> net(cfg, rng);
  SeededRng xrng(60);
  Matrix<double> x(5, 7);
  for (int c = 0; c < 7; ++c)
    for (int r = 0; r < 5; ++r) x(r, c) = xrng.uniform(-2.0, 2.0);
  const Matrix<double> y = net.forward(x, Mode::eval);
  for (int c = 0; c < 7; ++c) {
    const Matrix<double> yc = net.forward(x.col(c), Mode::eval);
    CHECK((y.col(c) - yc).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("forward rejects wrong input rows") {
  SeededRng rng(7);
  Mlp<float> net({3, 1, {4}, false, 0.0}, rng);
  Matrix<float> bad = Matrix<float>::Zero(2, 1);
  CHECK_THROWS_AS((void)net.forward(bad, Mode::eval), ShapeMismatchError);
}

// ---------------------------------------------------------------- layernorm

TEST_CASE("hidden activations are unit-normalized per sample") {
  SeededRng rng(8);
  MlpConfig cfg{6, 2, {64, 64}, true, 0.0};
  Mlp<double> net(cfg, rng);
  Matrix<double> x = Matrix<double>::Random(6, 9) * 3.0;
  Mlp<double>::Cache cache;
  (void)net.forward(x, Mode::eval, nullptr, &cache);
  REQUIRE(cache.xhat.size() == 2);
  for (const auto& xhat : cache.xhat) {
    for (int c = 0; c < xhat.cols(); ++c) {
      const double mean = xhat.col(c).mean();
      const double var = xhat.col(c).array().square().mean() - mean * mean;
      CHECK(std::abs(mean) < 1e-10);
      CHECK(var == doctest::Approx(1.0).epsilon(1e-3));  // biased, with the 1e-5 floor
    }
  }
}

// ---------------------------------------------------------------- dropout

TEST_CASE("dropout zeroes the configured fraction and rescales the rest") {
  SeededRng rng(9);
  MlpConfig cfg{1, 1, {10000}, false, 0.5};
  Mlp<float> net(cfg, rng);
  Matrix<float> x = Matrix<float>::Constant(1, 1, 1.0f);
  SeededRng drop_rng(90);
  Mlp<float>::Cache cache;
  (void)net.forward(x, Mode::train, &drop_rng, &cache);
  REQUIRE(cache.mask.size() == 1);
  const auto& m = cache.mask[0];
  REQUIRE(m.size() == 10000);
  int zeros = 0;
  for (int i = 0; i < 10000; ++i) {
    if (m.data()[i] == 0.0f)
      ++zeros;
    else
      CHECK(m.data()[i] == 2.0f);  // 1/(1-p)
  }
  CHECK(zeros > 4500);
  CHECK(zeros < 5500);
}

TEST_CASE("a one-percent drop rate drops about one percent") {
  SeededRng rng(10);
  MlpConfig cfg{1, 1, {10000}, false, 0.01};
  Mlp<float> net(cfg, rng);
  Matrix<float> x = Matrix<float>::Constant(1, 1, 1.0f);
  SeededRng drop_rng(91);
  Mlp<float>::Cache cache;
  (void)net.forward(x, Mode::train, &drop_rng, &cache);
  const auto& m = cache.mask[0];
  int zeros = 0;
  bool zero_in_first_half = false, zero_in_second_half = false;
  for (int i = 0; i < 10000; ++i) {
    if (m.data()[i] == 0.0f) {
      ++zeros;
      (i < 5000 ? zero_in_first_half : zero_in_second_half) = true;
    }
  }
  CHECK(zeros > 50);
  CHECK(zeros < 150);
  CHECK(zero_in_first_half);   // the skip sampler must cover the whole layer
  CHECK(zero_in_second_half);
}

TEST_CASE("dropout is inert in eval mode and varies across train calls") {
  SeededRng rng(11);
  MlpConfig cfg{3, 2, {32}, false, 0.3};
  Mlp<double> net(cfg, rng);
  Matrix<double> x = Matrix<double>::Random(3, 4);

  const Matrix<double> e1 = net.forward(x, Mode::eval);
  const Matrix<double> e2 = net.forward(x, Mode::eval);
  CHECK((e1 - e2).cwiseAbs().maxCoeff() == 0.0);

  SeededRng drop_rng(92);
  const Matrix<double> t1 = net.forward(x, Mode::train, &drop_rng);
  const Matrix<double> t2 = net.forward(x, Mode::train, &drop_rng);
  CHECK((t1 - t2).cwiseAbs().maxCoeff() > 0.0);  // fresh masks each call

  CHECK_THROWS_AS((void)net.forward(x, Mode::train), Error);  // rng required
}

// ---------------------------------------------------------------- gradients

namespace {

struct GradCheckStats {
  double max_rel = 0.0;
  int params_checked = 0;
};

// near-zero derivatives are judged against an absolute floor: central
// differences at h=1e-6 carry ~1e-10 roundoff, which would dominate a pure
// ratio, while real gradient bugs err at the derivative's own scale
double rel_err(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-3});
  return std::abs(a - b) / denom;
}

// Central-difference check of every parameter (and the input) of one config.
GradCheckStats grad_check(const MlpConfig& cfg, int batch, std::uint64_t seed) {
  SeededRng rng(seed);
  Mlp<double> net(cfg, rng);

  SeededRng data_rng(seed + 1000);
  Matrix<double> x(cfg.input, batch);
  Matrix<double> dy(cfg.output, batch);

  // redraw until no rectifier input sits on the kink (FD would straddle it)
  for (int attempt = 0;; ++attempt) {
    REQUIRE(attempt < 100);
    for (int c = 0; c < batch; ++c)
      for (int r = 0; r < cfg.input; ++r) x(r, c) = data_rng.uniform(-2.0, 2.0);
    Mlp<double>::Cache probe;
    (void)net.forward(x, Mode::eval, nullptr, &probe);
    double closest = 1e9;
    for (const auto& z : probe.relu_in) closest = std::min(closest, z.cwiseAbs().minCoeff());
    if (closest > 1e-4) break;
  }
  for (int c = 0; c < batch; ++c)
    for (int r = 0; r < cfg.output; ++r) dy(r, c) = data_rng.uniform(-1.0, 1.0);

  Mlp<double>::Cache cache;
  (void)net.forward(x, Mode::eval, nullptr, &cache);
  Matrix<double> dx;
  const Vector<double> analytic = net.backward(cache, dy, &dx);

  const auto loss = [&](const Matrix<double>& input) {
    return (net.forward(input, Mode::eval).array() * dy.array()).sum();
  };

  GradCheckStats stats;
  const double h = 1e-6;
  for (int i = 0; i < net.param_count(); ++i) {
    const double keep = net.params()[i];
    net.params()[i] = keep + h;
    const double up = loss(x);
    net.params()[i] = keep - h;
    const double down = loss(x);
    net.params()[i] = keep;
    const double fd = (up - down) / (2.0 * h);
    stats.max_rel = std::max(stats.max_rel, rel_err(fd, analytic[i]));
    ++stats.params_checked;
  }
  for (int c = 0; c < batch; ++c) {
    for (int r = 0; r < cfg.input; ++r) {
      const double keep = x(r, c);
      x(r, c) = keep + h;
      const double up = loss(x);
      x(r, c) = keep - h;
      const double down = loss(x);
      x(r, c) = keep;
      const double fd = (up - down) / (2.0 * h);
      stats.max_rel = std::max(stats.max_rel, rel_err(fd, dx(r, c)));
    }
  }
  return stats;
}

}  // namespace

TEST_CASE("analytic gradients match central differences over 50 random configs") {
  SeededRng meta(1234);
  double worst = 0.0;
  long total_params = 0;
  for (int trial = 0; trial < 50; ++trial) {
    MlpConfig cfg;
    cfg.input = 1 + static_cast<int>(meta.index(5));
    cfg.output = 1 + static_cast<int>(meta.index(4));
    const int depth = 1 + static_cast<int>(meta.index(2));
    cfg.hidden.clear();
    for (int l = 0; l < depth; ++l) cfg.hidden.push_back(2 + static_cast<int>(meta.index(6)));
    cfg.layer_norm = trial % 2 == 1;  // half the configs exercise layernorm
    cfg.dropout = 0.0;
    const int batch = 1 + static_cast<int>(meta.index(4));

    const GradCheckStats stats = grad_check(cfg, batch, 5000 + trial);
    total_params += stats.params_checked;
    worst = std::max(worst, stats.max_rel);
    if (stats.max_rel >= 1e-4) {
      CAPTURE(trial);
      CAPTURE(cfg.input);
      CAPTURE(cfg.layer_norm);
      REQUIRE(stats.max_rel < 1e-4);
    }
  }
  CHECK(worst < 1e-4);
  CHECK(total_params > 1000);
}

TEST_CASE("backward accumulates weight, bias, and norm gradients in place") {
  SeededRng rng(13);
  MlpConfig cfg{3, 2, {5}, true, 0.0};
  Mlp<double> net(cfg, rng);
  Matrix<double> x = Matrix<double>::Random(3, 4);
  Mlp<double>::Cache cache;
  (void)net.forward(x, Mode::eval, nullptr, &cache);
  Matrix<double> dy = Matrix<double>::Ones(2, 4);
  const Vector<double> g = net.backward(cache, dy);
  REQUIRE(g.size() == net.param_count());
  CHECK(g.cwiseAbs().maxCoeff() > 0.0);
}

// ---------------------------------------------------------------- adam

TEST_CASE("adam drives a 10-D quadratic below 1e-3 within 500 steps") {
  SeededRng rng(14);
  Vector<double> target(10), curvature(10);
  for (int i = 0; i < 10; ++i) {
    target[i] = rng.uniform(-1.0, 1.0);
    curvature[i] = rng.uniform(0.5, 2.0);
  }
  const auto f = [&](const Vector<double>& x) {
    return (curvature.array() * (x - target).array().square()).sum();
  };

  Vector<double> x = Vector<double>::Zero(10);
  Adam<double> opt(10, 0.05);
  const double f0 = f(x);
  for (int step = 0; step < 500; ++step) {
    const Vector<double> grad = (2.0 * curvature.array() * (x - target).array()).matrix();
    opt.step(x, grad);
  }
  CHECK(opt.steps() == 500);
  CHECK(f(x) < 1e-3);
  CHECK(f(x) < f0);
}

TEST_CASE("adam takes lr-sized first steps regardless of gradient scale") {
  // with bias correction the first update is lr * sign(grad)
  Vector<double> x = Vector<double>::Zero(2);
  Vector<double> g(2);
  g << 1000.0, -0.001;
  Adam<double> opt(2, 0.1);
  opt.step(x, g);
  CHECK(x[0] == doctest::Approx(-0.1).epsilon(1e-4));
  CHECK(x[1] == doctest::Approx(0.1).epsilon(1e-4));
}

TEST_CASE("adam rejects mismatched sizes") {
  Vector<double> x = Vector<double>::Zero(3);
  Vector<double> g = Vector<double>::Zero(2);
  Adam<double> opt(3, 0.1);
  CHECK_THROWS_AS(opt.step(x, g), ShapeMismatchError);
}

// ---------------------------------------------------------------- soft update

TEST_CASE("soft update blends with the retention factor") {
  Vector<double> target(2), online(2);
  target << 1.0, -1.0;
  online << 0.0, 1.0;
  soft_update(target, online, 0.995);
  CHECK(target[0] == doctest::Approx(0.995));
  CHECK(target[1] == doctest::Approx(-0.99));

  Vector<double> bad(3);
  CHECK_THROWS_AS(soft_update(bad, online, 0.995), ShapeMismatchError);

  // eps 1 freezes the target; eps 0 copies the online net
  Vector<double> frozen = target;
  soft_update(frozen, online, 1.0);
  CHECK((frozen - target).cwiseAbs().maxCoeff() == 0.0);
  soft_update(frozen, online, 0.0);
  CHECK((frozen - online).cwiseAbs().maxCoeff() == 0.0);
}

// ---------------------------------------------------------------- gaussian head

TEST_CASE("squashed sampling reproduces its own log density") {
  SeededRng rng(15);
  const int a = 3, batch = 8;
  Matrix<double> mean(a, batch), log_std(a, batch);
  // ranges chosen so |pre| stays small enough for the naive density below
  for (int c = 0; c < batch; ++c)
    for (int r = 0; r < a; ++r) {
      mean(r, c) = rng.uniform(-1.0, 1.0);
      log_std(r, c) = rng.uniform(-3.0, -0.5);
    }
  SeededRng noise(150);
  const auto s = sample_squashed_gaussian(mean, log_std, noise);

  for (int c = 0; c < batch; ++c) {
    double lp = 0.0;
    for (int r = 0; r < a; ++r) {
      const double sigma = std::exp(log_std(r, c));
      CHECK(s.sigma(r, c) == doctest::Approx(sigma));
      const double pre = mean(r, c) + sigma * s.z(r, c);
      CHECK(s.pre(r, c) == doctest::Approx(pre));
      CHECK(s.action(r, c) == doctest::Approx(std::tanh(pre)));
      CHECK(std::abs(s.action(r, c)) < 1.0);
      CHECK(s.clamp_pass(r, c) == 1.0);
      // naive density recomputation (safe here: |pre| is moderate)
      const double z = s.z(r, c);
      lp += -0.5 * z * z - log_std(r, c) - 0.9189385332046727;
      lp -= std::log(1.0 - std::tanh(pre) * std::tanh(pre));
    }
    CHECK(s.log_prob(c) == doctest::Approx(lp).epsilon(1e-9));
  }
}

TEST_CASE("log std is clamped to [-20, 2] with the pass-through flag cleared") {
  Matrix<double> mean = Matrix<double>::Zero(2, 1);
  Matrix<double> log_std(2, 1);
  log_std << 5.0, -25.0;
  SeededRng noise(151);
  const auto s = sample_squashed_gaussian(mean, log_std, noise);
  CHECK(s.sigma(0, 0) == doctest::Approx(std::exp(2.0)));
  CHECK(s.sigma(1, 0) == doctest::Approx(std::exp(-20.0)));
  CHECK(s.clamp_pass(0, 0) == 0.0);
  CHECK(s.clamp_pass(1, 0) == 0.0);
}

TEST_CASE("sampling is deterministic per rng seed") {
  Matrix<double> mean = Matrix<double>::Constant(2, 3, 0.3);
  Matrix<double> log_std = Matrix<double>::Constant(2, 3, -1.0);
  SeededRng n1(152), n2(152);
  const auto s1 = sample_squashed_gaussian(mean, log_std, n1);
  const auto s2 = sample_squashed_gaussian(mean, log_std, n2);
  CHECK((s1.action - s2.action).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.log_prob - s2.log_prob).cwiseAbs().maxCoeff() == 0.0);

  const Matrix<double> det = squashed_mean(mean);
  CHECK(det(0, 0) == doctest::Approx(std::tanh(0.3)));
}

TEST_CASE("squashed sampling rejects shape mismatches") {
  Matrix<double> mean = Matrix<double>::Zero(2, 3);
  Matrix<double> log_std = Matrix<double>::Zero(3, 2);
  SeededRng noise(153);
  CHECK_THROWS_AS((void)sample_squashed_gaussian(mean, log_std, noise), ShapeMismatchError);
}

TEST_CASE("the tanh density term is stable far into the tails") {
  // naive log(1 - tanh(x)^2) underflows to -inf near |x| ~ 20
  const double v50 = log_one_minus_tanh_sq(50.0);
  CHECK(std::isfinite(v50));
  CHECK(v50 == doctest::Approx(2.0 * M_LN2 - 100.0).epsilon(1e-12));
  CHECK(log_one_minus_tanh_sq(-50.0) == doctest::Approx(v50));
  CHECK(log_one_minus_tanh_sq(0.0) == doctest::Approx(0.0));
  // agreement with the naive form where that one is still accurate
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double naive = std::log(1.0 - std::tanh(x) * std::tanh(x));
    CHECK(log_one_minus_tanh_sq(x) == doctest::Approx(naive).epsilon(1e-10));
  }
}

TEST_CASE("softplus is accurate at both extremes") {
  CHECK(softplus(0.0) == doctest::Approx(M_LN2));
  CHECK(softplus(100.0) == doctest::Approx(100.0));
  CHECK(softplus(-100.0) == doctest::Approx(std::exp(-100.0)));
  CHECK(softplus(1.0) == doctest::Approx(std::log(1.0 + std::exp(1.0))));
}

// ---------------------------------------------------------------- checkpoints

TEST_CASE("checkpoint round-trips named arrays bit-exactly") {
  const std::string path = "/tmp/hubrl_test_ckpt.bin";
  std::vector<NamedArray> arrays;
  arrays.push_back({"weights", {2, 3}, {1.0f, -0.0f, 3.5f, -2.25f, 1e-30f, 6.0f}});
  arrays.push_back({"scalar", {1}, {42.0f}});
  arrays.push_back({"empty_name_ok", {0}, {}});
  write_checkpoint(path, arrays);

  const auto back = read_checkpoint(path);
  REQUIRE(back.size() == 3);
  CHECK(back[0].name == "weights");
  CHECK(back[0].dims == std::vector<std::uint32_t>{2, 3});
  REQUIRE(back[0].data.size() == 6);
  for (int i = 0; i < 6; ++i) {
    std::uint32_t a, b;
    std::memcpy(&a, &arrays[0].data[i], 4);
    std::memcpy(&b, &back[0].data[i], 4);
    CHECK(a == b);  // bit-exact, signed zero included
  }
  CHECK(back[1].data[0] == 42.0f);
  CHECK(back[2].data.empty());
  std::remove(path.c_str());
}

TEST_CASE("checkpoint writes are deterministic") {
  const std::string p1 = "/tmp/hubrl_test_ckpt1.bin", p2 = "/tmp/hubrl_test_ckpt2.bin";
  const std::vector<NamedArray> arrays = {{"a", {2}, {1.0f, 2.0f}}, {"b", {1}, {3.0f}}};
  write_checkpoint(p1, arrays);
  write_checkpoint(p2, arrays);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string c1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string c2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(c1 == c2);
  CHECK(c1.size() == 8 + 4 + 4 + (2 + 1 + 1 + 4 + 8) + (2 + 1 + 1 + 4 + 4));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("checkpoint rejects foreign or damaged files") {
  const std::string path = "/tmp/hubrl_test_badmagic.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTMYFMT" << std::string(64, '\0');
  }
  CHECK_THROWS_AS((void)read_checkpoint(path), SpecMismatchError);
  std::remove(path.c_str());

  CHECK_THROWS_AS((void)read_checkpoint("/tmp/hubrl_does_not_exist.bin"), Error);

  // dims that disagree with the payload are refused at write time
  const std::vector<NamedArray> bad = {{"x", {3}, {1.0f}}};
  CHECK_THROWS_AS(write_checkpoint("/tmp/hubrl_test_bad.bin", bad), ShapeMismatchError);
}

TEST_CASE("checkpoint lookup helpers") {
  const std::vector<NamedArray> arrays = {{"actor/theta", {1}, {0.0f}}};
  CHECK(has_array(arrays, "actor/theta"));
  CHECK_FALSE(has_array(arrays, "critic/theta"));
  CHECK(&find_array(arrays, "actor/theta") == &arrays[0]);
  CHECK_THROWS_AS((void)find_array(arrays, "critic/theta"), SpecMismatchError);
}
