#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace botw {

// Streams drawn from within one round. Keeping them apart means the learner's
// sampling never shifts the environment's noise sequence and vice versa.
enum class Stream : std::uint64_t {
  kPolicy = 1,
  kNoise = 2,
  kCorruption = 3,
  kFixture = 4,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based generator keyed by (seed, round, stream).
///
/// The i-th output is a pure function of the key and i, so a run can be
/// split across threads or replayed from any round without replaying the
/// rounds before it. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t round, Stream stream) noexcept
      : key_(splitmix64(splitmix64(splitmix64(seed) ^ round) ^
                        static_cast<std::uint64_t>(stream))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    ++counter_;
    return splitmix64(key_ + counter_ * 0xD1B54A32D192ED03ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; one draw per call, no cached spare.
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace botw
