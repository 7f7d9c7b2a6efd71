#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace sublm::util {

// Deterministic RNG wrapper. All randomness in the project goes through this
// class; std:: distributions are avoided because their output is not pinned
// by the standard, and we promise bit-identical runs for a given seed.
class Rng {
public:
  explicit Rng(uint64_t seed) : engine_(splitmix(seed)) {}

  // Derive an independent stream for a tagged sub-task (e.g. one utterance).
  static Rng derive(uint64_t seed, uint64_t stream) {
    return Rng(splitmix(seed ^ (0x9e3779b97f4a7c15ull + stream * 0xbf58476d1ce4e5b9ull)));
  }

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n) {
    // Rejection sampling keeps the distribution exact.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    // Box-Muller; one value per call keeps the stream simple.
    double u1 = next_double();
    double u2 = next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  static uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

} // namespace sublm::util
