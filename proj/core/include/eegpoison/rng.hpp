#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace eegpoison {

/// Deterministic pseudo-random generator (xoshiro256** seeded through
/// splitmix64). The standard <random> distributions are implementation
/// defined, so everything that must reproduce bit-for-bit across builds
/// goes through this class instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = split_mix(x);
    bool all_zero = true;
    for (auto word : state_) all_zero = all_zero && word == 0;
    if (all_zero) state_[0] = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Unbiased integer in [0, n). Lemire's multiply-shift rejection.
  std::uint64_t bounded(std::uint64_t n) {
    assert(n > 0);
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second sample of each pair is
  /// cached, so draw order alone determines the stream.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Fisher-Yates shuffle driven by bounded().
  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// Derives an independent substream seed from (seed, tag). Used to give
  /// every component of a run its own stream: (seed, "split"),
  /// (seed, "model/knn"), (seed, "poison/to_target(High-Risk)"), ...
  static std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a 64
    for (const char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001B3ULL;
    }
    std::uint64_t x = seed;
    const std::uint64_t a = split_mix(x);
    x = a ^ h;
    return split_mix(x);
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  static std::uint64_t split_mix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace eegpoison
