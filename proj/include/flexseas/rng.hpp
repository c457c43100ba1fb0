#pragma once

#include <cstdint>

namespace flexseas {

/// Seeded pseudorandom stream used by every simulator in the library.
///
/// Generator: xoshiro256++ 1.0 (Blackman/Vigna), state initialized from the
/// 64-bit seed through four steps of splitmix64. Uniform doubles take the top
/// 53 bits mapped into (0, 1]; normal deviates come from the basic Box-Muller
/// transform (pairs, the second deviate is cached). The stream layout is part
/// of the reproducibility contract: identical (seed, draw sequence) produce
/// identical output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on (0, 1] with 53-bit resolution.
  double uniform01();

  /// Standard normal via Box-Muller.
  double gaussian();

  /// +1 or -1 with equal probability (one state bit per draw).
  double rademacher();

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace flexseas
