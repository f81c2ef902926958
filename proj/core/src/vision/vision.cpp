#include "hubrl/vision/vision.hpp"

#include <cmath>
#include <deque>
#include <fstream>

#include "hubrl/errors.hpp"

namespace hubrl::vision {

ColorRange default_red_range() { return {{200, 0, 0}, {255, 80, 80}}; }

RgbImage render_scene(int ball_x, int ball_y, const GoalCircle& goal) {
  RgbImage img;
  // goal outline: pixels whose center lies within half a pixel of the radius
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double d = std::hypot(x - goal.cx, y - goal.cy);
      if (std::abs(d - goal.radius) <= 0.5) {
        auto* p = img.px(x, y);
        p[0] = 0;
        p[1] = 255;
        p[2] = 0;
      }
    }
  }
  // marker disc radius 3, filled, drawn on top
  for (int y = std::max(0, ball_y - 3); y <= std::min(img.height - 1, ball_y + 3); ++y) {
    for (int x = std::max(0, ball_x - 3); x <= std::min(img.width - 1, ball_x + 3); ++x) {
      if (std::hypot(x - ball_x, y - ball_y) <= 3.0) {
        auto* p = img.px(x, y);
        p[0] = 255;
        p[1] = 0;
        p[2] = 0;
      }
    }
  }
  return img;
}

std::vector<ComponentCenter> detect_red_components(const RgbImage& img, const ColorRange& range) {
  const int w = img.width, h = img.height;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto* p = img.px(x, y);
      bool in = true;
      for (int c = 0; c < 3; ++c) in = in && p[c] >= range.min[c] && p[c] <= range.max[c];
      mask[static_cast<std::size_t>(y) * w + x] = in ? 1 : 0;
    }

  std::vector<ComponentCenter> out;
  std::deque<std::pair<int, int>> frontier;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask[static_cast<std::size_t>(y) * w + x]) continue;
      // flood-fill one 4-connected component
      ComponentCenter c;
      double sx = 0.0, sy = 0.0;
      mask[static_cast<std::size_t>(y) * w + x] = 0;
      frontier.emplace_back(x, y);
      while (!frontier.empty()) {
        auto [px, py] = frontier.front();
        frontier.pop_front();
        sx += px;
        sy += py;
        ++c.pixels;
        const int nx[4] = {px - 1, px + 1, px, px};
        const int ny[4] = {py, py, py - 1, py + 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
          auto& m = mask[static_cast<std::size_t>(ny[k]) * w + nx[k]];
          if (m) {
            m = 0;
            frontier.emplace_back(nx[k], ny[k]);
          }
        }
      }
      c.x = sx / c.pixels;
      c.y = sy / c.pixels;
      out.push_back(c);
    }
  }
  return out;
}

double reward_mixed(const std::vector<ComponentCenter>& centers, const GoalCircle& goal,
                    double prev_reward) {
  if (centers.empty()) return prev_reward;
  double sum = 0.0;
  for (const auto& c : centers) sum += std::hypot(c.x - goal.cx, c.y - goal.cy);
  return -sum / (static_cast<double>(centers.size()) * 100.0);
}

Tensor to_grayscale_obs(const RgbImage& img) {
  Tensor t = Tensor::zeros({img.height, img.width});
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const auto* p = img.px(x, y);
      t.at(y, x) = static_cast<float>(std::lround(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]));
    }
  return t;
}

void write_ppm(const RgbImage& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << "P6\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()), static_cast<long>(img.data.size()));
}

}  // namespace hubrl::vision
