#pragma once

#include <cstdint>
#include <random>

#include "torlevy/common.hpp"

namespace torlevy {

// splitmix64 mixing step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic random stream: mt19937_64 engine with hand-rolled
// uniform/normal/exponential transforms so draws are bit-reproducible
// across standard library implementations.  Per-path streams are derived
// from (seed, stream_index) via splitmix64, so results do not depend on
// the worker count.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_index = 0)
      : engine_(splitmix64(seed ^ splitmix64(stream_index + 1))) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1]
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential(double rate = 1.0) { return -std::log(uniform_pos()) / rate; }

  // Box-Muller; both values of each pair are consumed in order
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace torlevy
