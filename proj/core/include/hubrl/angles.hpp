#pragma once

#include <cmath>

namespace hubrl {

// fmod with a non-negative result: positive_fmod(-30, 360) == 330
inline double positive_fmod(double x, double m) {
  const double r = std::fmod(x, m);
  return r < 0.0 ? r + m : r;
}

}  // namespace hubrl
