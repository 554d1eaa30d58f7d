#ifndef PRONY_RNG_HPP
#define PRONY_RNG_HPP

#include <cstdint>

namespace prony {

/// Counter-based generator: every value is a pure function of
/// (seed, stream, counter), so draws can be produced in any order and by any
/// number of workers without changing the result.
///
/// The mixing function is the SplitMix64 finalizer applied to a Weyl-sequence
/// combination of the three keys.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    std::uint64_t z = seed_ * 0x9E3779B97F4A7C15ULL;
    z = mix(z ^ (stream_ + 0xD1B54A32D192ED03ULL));
    z = mix(z + counter * 0x9E3779B97F4A7C15ULL);
    return z;
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(counter);
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream() const noexcept { return stream_; }

  /// Independent generator for a sub-task (chunk, sweep cell, leaf index).
  constexpr CounterRng substream(std::uint64_t index) const noexcept {
    return CounterRng(seed_, mix(stream_ * 0xBF58476D1CE4E5B9ULL + index + 1));
  }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Serial kernels are the reference implementation; parallel kernels must
/// reproduce them bit for bit.
enum class Execution { serial, parallel };

}  // namespace prony

#endif  // PRONY_RNG_HPP
