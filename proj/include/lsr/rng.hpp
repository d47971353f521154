#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lsr {

/// Deterministic random source. All randomness in the repo flows from
/// explicit 64-bit seeds through this class; there is no global RNG state.
/// Uniform doubles and normals are produced from the raw engine output so
/// results do not depend on the standard library's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  /// Uniform integer in [0, n). n must be positive.
  int below(int n) {
    const auto wide = static_cast<unsigned __int128>(next());
    return static_cast<int>((wide * static_cast<unsigned __int128>(n)) >> 64);
  }

  /// Derives an independent stream seed, e.g. one per evaluation trial.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lsr
