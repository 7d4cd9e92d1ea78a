#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cv2x {

// splitmix64 (Steele et al.), used for compact per-link generators and for
// deriving independent stream seeds from a base seed.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives a stream seed from a base seed and up to two stream labels.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = base;
  s ^= splitmix64_next(a);
  splitmix64_next(s);
  s ^= splitmix64_next(b) + 0x632BE59BD9B4E019ull;
  splitmix64_next(s);
  return s;
}

inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
}

// Standard normal draw from a splitmix state (Box-Muller, cosine branch only,
// so the state stays a single 8-byte word per link).
inline double standard_normal(std::uint64_t& state) {
  double u1 = uniform01(state);
  double u2 = uniform01(state);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(mix_seed(base, a, b));
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace cv2x
