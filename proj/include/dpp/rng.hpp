#pragma once

#include <cstdint>
#include <random>

namespace dpp {

/// Version tag of the per-trajectory seeding scheme, recorded in reports.
inline constexpr const char* kSubstreamScheme = "splitmix64(seed, trial) -> mt19937_64, v1";

/// Uniform doubles from a 64-bit engine. Draw order per round: coin, branch,
/// then the noise draws (one in n = 2, radius and angle in n = 3) only when
/// the noise branch is taken.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Independent stream for trajectory `index` of a run seeded by `seed`.
  static Rng substream(std::uint64_t seed, std::uint64_t index);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dpp
