#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rydsim {

// Counter-style pseudo-random stream built on the splitmix64 mixer.
// Substreams are derived from a (seed, index) pair, so trajectory i always
// sees the same draws no matter how many threads run the ensemble or in
// which order the trajectories execute.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream for one Monte Carlo trajectory.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = mix(seed ^ 0x9e3779b97f4a7c15ULL);
    z = mix(z + 0xbf58476d1ce4e5b9ULL * (index + 1));
    return Rng(z);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  // Standard normal deviate via Box-Muller. Consumes exactly two words per
  // call so the stream position stays predictable.
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

// Width conversion for Gaussian profiles: FWHM = 2*sqrt(2*ln 2) * sigma.
inline double fwhm_to_sigma(double fwhm) {
  return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

}  // namespace rydsim
