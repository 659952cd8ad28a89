#pragma once

#include <cmath>
#include <cstdint>

namespace minkassign {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based uniform stream. Each draw is a pure function of
// (seed, chunk, sample, cell), so any chunk can be generated on any thread,
// in any order, with identical results.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(splitmix64(seed)) {}

  // uniform in (0, 1]; zero excluded so -log stays finite
  double uniform(std::uint64_t chunk, std::uint64_t sample, std::uint64_t cell) const {
    std::uint64_t h = splitmix64(splitmix64(splitmix64(seed_ ^ chunk) ^ sample) ^ cell);
    return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

// Exponential draw by inversion.
inline double exp_draw(double u, double rate) { return -std::log(u) / rate; }

}  // namespace minkassign
