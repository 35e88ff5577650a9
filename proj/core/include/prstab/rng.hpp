#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace prstab {

/// Counter-based generator: the i-th draw of stream s under seed k is a pure
/// function of (k, s, i). Distinct streams give independent sequences, so work
/// can be split across threads without changing any draw.
///
/// The output function is the SplitMix64 finalizer applied to key + i * gamma,
/// with the key itself derived by mixing (seed, stream).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t next_u64() noexcept { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform on (0, 1].
  double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  /// Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream index for a (purpose, a, b) cell, e.g. (matrix draw, m, trial).
constexpr std::uint64_t stream_id(std::uint64_t purpose, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return (purpose << 56) ^ (a << 28) ^ b;
}

}  // namespace prstab
