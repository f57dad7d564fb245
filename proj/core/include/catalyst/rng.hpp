// Deterministic counter-based pseudo-random numbers built on the SplitMix64
// finalizer (Steele, Lea & Flood; the generator behind
// java.util.SplittableRandom).  Every draw is a pure function of
// (seed, counter), so identical seeds reproduce identical streams on any
// platform, streams can be split without sharing mutable state, and skipping
// ahead is O(1).
#pragma once

#include <cstddef>
#include <cstdint>

namespace catalyst {

// SplitMix64 output function: bijective 64-bit mix of `z`.
std::uint64_t splitmix64_mix(std::uint64_t z);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  // Next raw 64-bit draw: mix(seed + (counter+1) * golden gamma).
  std::uint64_t next_u64();

  // Uniform index in [0, n) via the 128-bit multiply-high reduction; the
  // modulo bias is at most n / 2^64.  Requires n > 0.
  std::size_t uniform_index(std::size_t n);

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform01();

  // Standard normal via Box-Muller; consumes exactly two draws.
  double gaussian();

  // Independent child stream; deterministic function of (seed, stream).
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace catalyst
