#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace nac {

// Deterministic, platform-independent uniform generator. std::mt19937_64 is
// portable, but the standard distributions are not; this wrapper derives
// doubles and integers from raw 64-bit draws so identical seeds give
// identical sequences everywhere.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {
    // splitmix warm-up so small seeds decorrelate
    next_u64();
    next_u64();
  }

  // Substream keyed by (seed, index); independent of draw order elsewhere.
  static RngStream keyed(std::uint64_t seed, std::uint64_t index) {
    return RngStream(mix(seed ^ mix(index + 0x9e3779b97f4a7c15ull)));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo,hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0,n)
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  // Fisher-Yates permutation of {0,...,n-1}
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(uniform_index(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[i], p[j]);
    }
    return p;
  }

  // standard normal via Box-Muller (deterministic pairing)
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
    return z ^ (z >> 33);
  }
  std::uint64_t state_;
};

}  // namespace nac
