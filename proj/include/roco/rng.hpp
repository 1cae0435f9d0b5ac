#pragma once

// Reproducible random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; every draw below is derived from raw
// 64-bit outputs so results do not depend on the standard library's
// distribution implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace roco {

inline constexpr std::string_view kRngName = "mt19937_64+splitmix64-seed/v1";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent named sub-streams of one seed.
enum class Stream : std::uint64_t {
  kEvents = 1,
  kChoice = 2,
  kMixture = 3,
  kOutlier = 4,
  kPositions = 5,
  kReference = 6,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed, Stream stream = Stream::kEvents)
      : engine_(splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = engine_();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = engine_();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }
  /// Pareto on [scale, inf) with Pr(X > x) = (x/scale)^(-alpha).
  double pareto(double scale, double alpha) { return scale * std::pow(uniform_pos(), -1.0 / alpha); }
  /// Standard normal via Box-Muller (one value per call).
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace roco
