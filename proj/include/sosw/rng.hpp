#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace sosw {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so sampling order and thread count never matter.
inline constexpr std::string_view kRngMethod =
    "splitmix64 counter hash; uniform = top 53 bits; normal = Box-Muller";

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                           std::uint64_t b = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(a + 0x51ed270b27b8f3a1ULL)) + b);
}

enum class Stream : std::uint64_t { Edges = 1, Planted = 2, Gaussian = 3, Aux = 4 };

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream)
      : key_(splitmix64(seed + 0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(stream))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(key_ ^ splitmix64(counter));
  }

  // Uniform in [0, 1).
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(bits(counter)) * bound) >> 64);
  }

  double normal(std::uint64_t counter) const {
    const double u1 = 1.0 - uniform(2 * counter);  // (0, 1]
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
};

}  // namespace sosw
