#pragma once

#include <cstdint>
#include <random>

namespace mpstomo {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of an independent substream, a hash of (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// mt19937_64 with a platform-independent uniform draw. std::uniform_real_distribution
/// is implementation-defined, so we build doubles from the top 53 bits ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mpstomo
