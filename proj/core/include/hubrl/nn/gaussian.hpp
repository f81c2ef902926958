#pragma once

#include <cmath>

#include "hubrl/nn/mlp.hpp"
#include "hubrl/rng.hpp"

namespace hubrl::nn {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5*log(2*pi)

// numerically safe log(1 + exp(x))
template <typename T>
T softplus(T x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, T(0));
}

// log(1 - tanh(x)^2) without catastrophic cancellation for large |x|:
// 1 - tanh(x)^2 = 4*exp(-2x)/(1+exp(-2x))^2, so the log is
// 2*(log 2 - x - softplus(-2x)).
template <typename T>
T log_one_minus_tanh_sq(T x) {
  return T(2) * (T(M_LN2) - x - softplus(T(-2) * x));
}

// One reparameterized draw from a tanh-squashed diagonal Gaussian policy,
// plus everything the manual actor gradient needs.
template <typename T>
struct SquashedSample {
  Matrix<T> action;      // tanh(mean + sigma*z), in (-1, 1)
  Matrix<T> pre;         // mean + sigma*z (pre-squash)
  Matrix<T> sigma;       // exp(clamped log_std)
  Matrix<T> z;           // the standard normal draws
  Matrix<T> clamp_pass;  // 1 where log_std was inside the clamp range
  RowVector<T> log_prob;  // per-column joint log density of `action`
};

// mean/log_std: action x batch. log_std is clamped to [-20, 2] before
// exponentiation. The log prob is the Gaussian density of the pre-squash
// value minus the tanh change-of-variables term, summed over action dims.
template <typename T>
SquashedSample<T> sample_squashed_gaussian(const Matrix<T>& mean, const Matrix<T>& log_std,
                                           SeededRng& rng) {
  if (mean.rows() != log_std.rows() || mean.cols() != log_std.cols())
    throw ShapeMismatchError("squashed gaussian: mean/log_std shapes differ");
  SquashedSample<T> s;
  const auto rows = mean.rows();
  const auto cols = mean.cols();
  s.z = Matrix<T>(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) s.z(r, c) = static_cast<T>(rng.normal());
  s.clamp_pass = ((log_std.array() >= T(kLogStdMin)) && (log_std.array() <= T(kLogStdMax)))
                     .template cast<T>()
                     .matrix();
  Matrix<T> clamped =
      log_std.array().max(T(kLogStdMin)).min(T(kLogStdMax)).matrix();
  s.sigma = clamped.array().exp().matrix();
  s.pre = mean + (s.sigma.array() * s.z.array()).matrix();
  s.action = s.pre.array().tanh().matrix();
  s.log_prob = RowVector<T>::Zero(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    T lp = T(0);
    for (Eigen::Index r = 0; r < rows; ++r) {
      lp += T(-0.5) * s.z(r, c) * s.z(r, c) - clamped(r, c) - T(kHalfLog2Pi);
      lp -= log_one_minus_tanh_sq(s.pre(r, c));
    }
    s.log_prob(c) = lp;
  }
  return s;
}

// The deterministic (evaluation) action of the same policy.
template <typename T>
Matrix<T> squashed_mean(const Matrix<T>& mean) {
  return mean.array().tanh().matrix();
}

}  // namespace hubrl::nn
