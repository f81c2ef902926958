#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hubrl/types.hpp"

namespace hubrl::vision {

// 64x64 RGB frame from the synthetic overhead camera.
struct RgbImage {
  int width = 64;
  int height = 64;
  std::vector<std::uint8_t> data = std::vector<std::uint8_t>(64 * 64 * 3, 0);  // row-major RGB

  std::uint8_t* px(int x, int y) { return data.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
  const std::uint8_t* px(int x, int y) const {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
};

struct GoalCircle {
  int cx = 0;
  int cy = 0;
  int radius = 5;
};

// Inclusive RGB threshold window for the detector.
struct ColorRange {
  std::uint8_t min[3];
  std::uint8_t max[3];
};

// Red: R >= 200, G <= 80, B <= 80 -- thresholds straight in RGB; the
// synthetic scene is noise-free, so no color-space conversion is needed.
ColorRange default_red_range();

struct ComponentCenter {
  double x = 0.0;
  double y = 0.0;
  int pixels = 0;
};

// Black background, green goal circle outline, then a filled red marker disc
// of radius 3 (drawn last, so it stays detectable even when overlapping).
RgbImage render_scene(int ball_x, int ball_y, const GoalCircle& goal);

// Threshold + 4-connected component labeling; returns each component's
// centroid in scan order. Empty when nothing matches.
std::vector<ComponentCenter> detect_red_components(const RgbImage& img, const ColorRange& range);

// Negated mean Euclidean pixel distance of the detected centers to the goal
// center, divided by 100. With no detections, the previous reward carries
// over unchanged.
double reward_mixed(const std::vector<ComponentCenter>& centers, const GoalCircle& goal,
                    double prev_reward);

// Luminance plane: round(0.299 R + 0.587 G + 0.114 B), values in [0,255],
// shaped (64,64).
Tensor to_grayscale_obs(const RgbImage& img);

// Binary PPM (P6) dump for eyeballing rendered frames.
void write_ppm(const RgbImage& img, const std::string& path);

}  // namespace hubrl::vision
