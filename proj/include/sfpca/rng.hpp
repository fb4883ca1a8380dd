#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sfpca {

/// SplitMix64 run in counter mode: the i-th draw of a stream is a pure
/// function of (key, i), so streams with distinct keys never interleave and
/// results are independent of evaluation schedule. Gaussians use Box-Muller
/// rather than std::normal_distribution, whose output is
/// implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t key) : key_(key) {}

  static constexpr const char* kName = "splitmix64-counter";

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + kGamma * ++counter_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal deviate.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Stream-splitting: derives the key for substream (a, b) of a run seed.
  /// Used to give every benchmark trial its own pre-split stream.
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b) {
    std::uint64_t k = finalize(seed);
    k = finalize(k ^ (kGamma * (a + 1)));
    k = finalize(k ^ (0xD1B54A32D192ED03ULL * (b + 1)));
    return k;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sfpca
