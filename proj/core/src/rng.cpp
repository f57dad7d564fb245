#include "catalyst/rng.hpp"

#include <cmath>

namespace catalyst {
namespace {

// 2^64 / golden ratio; the Weyl increment from the SplitMix64 reference.
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return splitmix64_mix(seed_ + counter_ * kGoldenGamma);
}

std::size_t Rng::uniform_index(std::size_t n) {
  const std::uint64_t r = next_u64();
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(r) * static_cast<unsigned __int128>(n)) >> 64);
}

double Rng::uniform01() {
  // Top 53 bits -> [0, 1) on the canonical 2^-53 grid.
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  // (0, 1] for the radial draw so log() stays finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return r * std::cos(kTwoPi * u2);
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64_mix(seed_ ^ splitmix64_mix(stream + kGoldenGamma)));
}

}  // namespace catalyst
