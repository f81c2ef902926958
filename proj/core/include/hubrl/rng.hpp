#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace hubrl {

// Deterministic random generator with named substreams.
//
// One SeededRng is created from the run seed; every consumer (env, agent
// init, exploration, replay sampling, ...) gets its own fork() so that the
// draw order of one consumer can never perturb another. The core is
// splitmix64, and the normal sampler is an explicit Marsaglia polar
// transform, so identical seeds give bit-identical streams on every
// platform -- std::normal_distribution makes no such promise.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform index in [0, n); n must be > 0
  std::size_t index(std::size_t n) { return next_u64() % n; }

  // standard normal (Marsaglia polar, pair cached)
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Independent substream named by `tag`. Does not advance this stream, so
  // the set of forks taken cannot change the parent's draws.
  SeededRng fork(std::string_view tag) const {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the tag
    for (char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    SeededRng child(state_ ^ (h | 1));
    child.next_u64();  // decouple from the parent's immediate output
    return SeededRng(child.next_u64());
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hubrl
