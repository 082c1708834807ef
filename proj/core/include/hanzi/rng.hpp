#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hanzi {

/// Seeded random source. Conversions to doubles and bounded integers are
/// done here rather than through <random> distributions so that streams are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Seed for the named sub-stream `stream` (and optional index, e.g. a
  /// worker id) of a run seeded with `seed`.
  static std::uint64_t derive(std::uint64_t seed, std::string_view stream,
                              std::uint64_t index = 0);

  static Rng stream(std::uint64_t seed, std::string_view name,
                    std::uint64_t index = 0) {
    return Rng(derive(seed, name, index));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace hanzi
