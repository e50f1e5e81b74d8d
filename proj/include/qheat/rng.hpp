#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qheat {

// Stream derivation: block b of a run seeded with s draws from an engine
// seeded by splitmix64(s, b).  Uniform/normal conversion is spelled out here
// rather than taken from <random> distributions, which are not pinned by the
// standard; identical (seed, block) always yields identical draws.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 sm{seed ^ (0xD1B54A32D192ED03ULL * (stream + 1))};
    eng_.seed(sm.next());
  }

  // uniform on [2^-53, 1]; never 0, so log() is always safe
  double uniform() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller pair, one value cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qheat
