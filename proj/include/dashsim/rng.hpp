#pragma once

#include <array>
#include <cstdint>

namespace dashsim {

// Deterministic 64-bit generator: xoshiro256** seeded through splitmix64.
// The algorithm is fixed so that a given seed yields the same sequence on
// every platform; std::mt19937 and the std distributions are avoided because
// their output is not pinned down by the standard.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform on [lo, hi], both inclusive. Rejection sampling, no modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform_double();

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace dashsim
