#pragma once

#include <cmath>
#include <cstdint>

namespace don {

// Counter-based generator: every (seed, stream) pair is an independent stream,
// so Monte-Carlo loops can draw per-sample streams keyed by (seed, sampleIndex)
// and stay reproducible under any thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    state_ = splitmix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
    // decorrelate nearby (seed, stream) pairs
    for (int i = 0; i < 4; ++i) state_ = splitmix(state_);
  }

  std::uint64_t next_u64() {
    state_ = splitmix(state_);
    return state_;
  }

  // uniform in [0,1) with 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // standard normal, Box-Muller (no internal caching, keeps streams stateless per call count)
  double normal() {
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t state_;
};

}  // namespace don
