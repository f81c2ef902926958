#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "hubrl/errors.hpp"
#include "hubrl/rng.hpp"

namespace hubrl::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;  // col-major; batch = columns
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

enum class Mode { train, eval };

struct MlpConfig {
  int input = 0;
  int output = 0;
  std::vector<int> hidden = {256, 256};
  bool layer_norm = false;  // hidden layers only
  double dropout = 0.0;     // hidden layers only; inverted scaling in train mode
};

// Fully connected net: per hidden layer affine -> (layernorm?) -> relu ->
// (dropout?); linear output layer. All parameters live in one flat vector
// (per layer: weight col-major, bias, then layernorm gain/bias if enabled),
// which makes the optimizer, soft updates, checkpoints, and numerical
// gradient checks one-liners over a single array.
//
// Templated on the scalar so training runs float32 while gradient
// verification runs a float64 shadow of the same code.
template <typename T>
class Mlp {
 public:
  // Weight init follows the usual fan-in rule: U(-k, k) with k = 1/sqrt(in),
  // biases alike; layernorm gains start at 1, biases at 0. Draws come from
  // `rng` in flat-storage order, so identical seeds give identical nets.
  Mlp(MlpConfig cfg, SeededRng& rng) : cfg_(std::move(cfg)) {
    sizes_.push_back(cfg_.input);
    for (int h : cfg_.hidden) sizes_.push_back(h);
    sizes_.push_back(cfg_.output);
    int total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      LayerOffsets off;
      off.w = total;
      total += sizes_[l] * sizes_[l + 1];
      off.b = total;
      total += sizes_[l + 1];
      if (cfg_.layer_norm && l + 2 < sizes_.size()) {  // hidden layers only
        off.gamma = total;
        total += sizes_[l + 1];
        off.beta = total;
        total += sizes_[l + 1];
      }
      offsets_.push_back(off);
    }
    theta_ = Vector<T>::Zero(total);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const T k = T(1) / std::sqrt(static_cast<T>(sizes_[l]));
      const int nw = sizes_[l] * sizes_[l + 1];
      for (int i = 0; i < nw; ++i) theta_[offsets_[l].w + i] = static_cast<T>(rng.uniform(-k, k));
      for (int i = 0; i < sizes_[l + 1]; ++i)
        theta_[offsets_[l].b + i] = static_cast<T>(rng.uniform(-k, k));
      if (offsets_[l].gamma >= 0)
        for (int i = 0; i < sizes_[l + 1]; ++i) theta_[offsets_[l].gamma + i] = T(1);
    }
  }

  const MlpConfig& config() const { return cfg_; }
  int input_size() const { return cfg_.input; }
  int output_size() const { return cfg_.output; }
  int param_count() const { return static_cast<int>(theta_.size()); }
  Vector<T>& params() { return theta_; }
  const Vector<T>& params() const { return theta_; }

  // Everything backward() needs from the matching forward() call.
  struct Cache {
    std::vector<Matrix<T>> x;        // input to each affine layer
    std::vector<Matrix<T>> xhat;     // layernorm unit-normalized values
    std::vector<Vector<T>> inv_std;  // layernorm 1/sqrt(var+eps), per column
    std::vector<Matrix<T>> relu_in;  // values fed to the rectifier
    std::vector<Matrix<T>> mask;     // dropout keep mask (already 1/(1-p) scaled)
  };

  // x: input x batch. rng is needed only for train-mode dropout.
  Matrix<T> forward(const Matrix<T>& x, Mode mode, SeededRng* rng = nullptr,
                    Cache* cache = nullptr) const {
    if (x.rows() != cfg_.input) throw ShapeMismatchError("mlp forward: wrong input rows");
    const int layers = static_cast<int>(offsets_.size());
    Matrix<T> h = x;
    if (cache) *cache = Cache{};
    for (int l = 0; l < layers; ++l) {
      if (cache) cache->x.push_back(h);
      Matrix<T> z = (w(l) * h).colwise() + b(l);
      const bool is_hidden = l + 1 < layers;
      if (!is_hidden) {
        h = std::move(z);
        break;
      }
      if (cfg_.layer_norm) {
        const auto n = static_cast<T>(z.rows());
        RowVector<T> mu = z.colwise().mean();
        Matrix<T> centered = z.rowwise() - mu;
        RowVector<T> var = centered.array().square().colwise().sum() / n;
        Vector<T> inv = (var.array() + T(1e-5)).rsqrt().transpose().matrix();
        Matrix<T> xhat = (centered.array().rowwise() * inv.transpose().array()).matrix();
        z = ((xhat.array().colwise() * gamma(l).array()).colwise() + beta(l).array()).matrix();
        if (cache) {
          cache->xhat.push_back(std::move(xhat));
          cache->inv_std.push_back(std::move(inv));
        }
      } else if (cache) {
        cache->xhat.emplace_back();
        cache->inv_std.emplace_back();
      }
      if (cache) cache->relu_in.push_back(z);
      h = z.cwiseMax(T(0));
      if (cfg_.dropout > 0.0 && mode == Mode::train) {
        if (!rng) throw Error("mlp forward: train-mode dropout needs an rng");
        Matrix<T> m = dropout_mask(h.rows(), h.cols(), *rng);
        h.array() *= m.array();
        if (cache) cache->mask.push_back(std::move(m));
      } else if (cache) {
        cache->mask.emplace_back();
      }
    }
    return h;
  }

  // dy: gradient at the output (output x batch). Returns gradients for the
  // flat parameter vector; optionally also the gradient wrt the input.
  Vector<T> backward(const Cache& cache, const Matrix<T>& dy, Matrix<T>* dx = nullptr) const {
    const int layers = static_cast<int>(offsets_.size());
    Vector<T> grads = Vector<T>::Zero(theta_.size());
    Matrix<T> d = dy;
    for (int l = layers - 1; l >= 0; --l) {
      if (l + 1 < layers) {  // undo dropout -> relu -> layernorm of hidden layer l
        if (cfg_.dropout > 0.0 && cache.mask[static_cast<std::size_t>(l)].size() > 0)
          d.array() *= cache.mask[static_cast<std::size_t>(l)].array();
        d.array() *= (cache.relu_in[static_cast<std::size_t>(l)].array() > T(0)).template cast<T>();
        if (cfg_.layer_norm) {
          const auto& xhat = cache.xhat[static_cast<std::size_t>(l)];
          const auto& inv = cache.inv_std[static_cast<std::size_t>(l)];
          gslice(grads, offsets_[l].gamma, sizes_[l + 1]) +=
              (d.array() * xhat.array()).rowwise().sum().matrix();
          gslice(grads, offsets_[l].beta, sizes_[l + 1]) += d.rowwise().sum();
          Matrix<T> dxhat = (d.array().colwise() * gamma(l).array()).matrix();
          const auto n = static_cast<T>(dxhat.rows());
          RowVector<T> mean_dxhat = dxhat.colwise().sum() / n;
          RowVector<T> mean_dxhat_xhat =
              ((dxhat.array() * xhat.array()).colwise().sum() / n).matrix();
          d = (((dxhat.rowwise() - mean_dxhat).array() -
                xhat.array().rowwise() * mean_dxhat_xhat.array())
                   .rowwise() *
               inv.transpose().array())
                  .matrix();
        }
      }
      const auto& x = cache.x[static_cast<std::size_t>(l)];
      Eigen::Map<Matrix<T>>(grads.data() + offsets_[l].w, sizes_[l + 1], sizes_[l]).noalias() +=
          d * x.transpose();
      gslice(grads, offsets_[l].b, sizes_[l + 1]) += d.rowwise().sum();
      if (l > 0)
        d = (w(l).transpose() * d).eval();
      else if (dx)
        *dx = w(0).transpose() * d;
    }
    return grads;
  }

  // parameter views (layer -> Eigen maps into the flat vector)
  Eigen::Map<const Matrix<T>> w(int l) const {
    return {theta_.data() + offsets_[l].w, sizes_[l + 1], sizes_[l]};
  }
  Eigen::Map<const Vector<T>> b(int l) const {
    return {theta_.data() + offsets_[l].b, sizes_[l + 1]};
  }
  Eigen::Map<const Vector<T>> gamma(int l) const {
    return {theta_.data() + offsets_[l].gamma, sizes_[l + 1]};
  }
  Eigen::Map<const Vector<T>> beta(int l) const {
    return {theta_.data() + offsets_[l].beta, sizes_[l + 1]};
  }

  const std::vector<int>& layer_sizes() const { return sizes_; }

 private:
  struct LayerOffsets {
    int w = -1;
    int b = -1;
    int gamma = -1;
    int beta = -1;
  };

  static Eigen::Ref<Vector<T>> gslice(Vector<T>& g, int offset, int n) {
    return g.segment(offset, n);
  }

  // With small drop rates almost every unit is kept, so instead of one
  // Bernoulli draw per element we jump between dropped elements with
  // geometric skips — same distribution, ~1/p fewer rng calls.
  Matrix<T> dropout_mask(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) const {
    const double p = cfg_.dropout;
    const T scale = T(1.0 / (1.0 - p));
    Matrix<T> m = Matrix<T>::Constant(rows, cols, scale);
    const double log_keep = std::log1p(-p);
    const auto total = static_cast<long>(rows * cols);
    double pos = -1.0;
    for (;;) {
      const double u = rng.uniform();
      pos += 1.0 + std::floor(std::log1p(-u) / log_keep);
      if (pos >= static_cast<double>(total)) break;
      m.data()[static_cast<long>(pos)] = T(0);
    }
    return m;
  }

  MlpConfig cfg_;
  std::vector<int> sizes_;
  std::vector<LayerOffsets> offsets_;
  Vector<T> theta_;
};

// target <- eps*target + (1-eps)*online, elementwise (eps is the retention
// factor: 0.995 keeps 99.5% of the target per update).
template <typename T>
void soft_update(Vector<T>& target, const Vector<T>& online, T eps) {
  if (target.size() != online.size()) throw ShapeMismatchError("soft_update: size mismatch");
  target = eps * target + (T(1) - eps) * online;
}

}  // namespace hubrl::nn
