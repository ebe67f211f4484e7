#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace ccpdmp {

/// Seeded generator owned by exactly one sampler run.
///
/// Uniform draws are built directly from the engine bits so that the stream
/// is identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Unit-rate exponential, -log(u).
  double exponential() { return -std::log(uniform()); }

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for one experiment cell: base XOR hash(cell coordinates).
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> cell) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto c : cell) h = mix64(h ^ mix64(c));
  return base ^ h;
}

}  // namespace ccpdmp
