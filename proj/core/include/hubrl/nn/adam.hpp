#pragma once

#include <cmath>

#include "hubrl/errors.hpp"
#include "hubrl/nn/mlp.hpp"

namespace hubrl::nn {

// Plain Adam with bias correction, operating on a flat parameter vector.
template <typename T>
class Adam {
 public:
  explicit Adam(Eigen::Index n, T lr, T beta1 = T(0.9), T beta2 = T(0.999), T eps = T(1e-8))
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(Vector<T>::Zero(n)),
        v_(Vector<T>::Zero(n)) {}

  void step(Vector<T>& params, const Vector<T>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
      throw ShapeMismatchError("adam: parameter/gradient size mismatch");
    ++t_;
    m_ = beta1_ * m_ + (T(1) - beta1_) * grads;
    v_ = (beta2_ * v_.array() + (T(1) - beta2_) * grads.array().square()).matrix();
    const T bc1 = T(1) - std::pow(beta1_, static_cast<T>(t_));
    const T bc2 = T(1) - std::pow(beta2_, static_cast<T>(t_));
    params.array() -= lr_ * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + eps_);
  }

  long steps() const { return t_; }
  T lr() const { return lr_; }

 private:
  T lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Vector<T> m_, v_;
};

}  // namespace hubrl::nn
