#pragma once

#include <cstdint>
#include <vector>

namespace pane {

/// Deterministic 64-bit generator (splitmix64). Every random draw in the
/// library flows through this type, so runs are reproducible bit-for-bit
/// across platforms and standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint32_t next_below(std::uint32_t bound) {
    const auto wide = static_cast<unsigned __int128>(next_u64());
    return static_cast<std::uint32_t>((wide * bound) >> 64);
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = next_below(static_cast<std::uint32_t>(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t state_;
};

/// Independent per-purpose streams derived from one root seed. Toggling a
/// feature that consumes one stream never perturbs the draws of another.
enum class StreamPurpose : std::uint64_t {
  init = 1,
  distortion = 2,
  sampling = 3,
  dropout = 4,
  split = 5,
  synthetic = 6,
};

inline RngStream derive_stream(std::uint64_t root_seed, StreamPurpose purpose,
                               std::uint64_t counter = 0) {
  RngStream mixer(root_seed ^ (static_cast<std::uint64_t>(purpose) * 0xD6E8FEB86659FD93ULL));
  std::uint64_t a = mixer.next_u64();
  RngStream mixer2(a ^ (counter * 0xA3EC647659359ACDULL));
  return RngStream(mixer2.next_u64());
}

}  // namespace pane
