#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace save {

/// Identifier recorded in scenario files; the draw primitives below are
/// defined exactly so traces reproduce from (seed, algorithm).
inline constexpr std::string_view kPrngAlgorithm = "mt19937_64";

/// splitmix64 finalizer over (seed, stream); used to give every Monte Carlo
/// run and sub-stream an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Draws are spelled out rather than delegated to <random> distributions,
/// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// 53-bit uniform on [0,1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Box-Muller, cosine branch; consumes two uniforms.
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

}  // namespace save
