// Counter-based random numbers: every draw is a pure function of
// (seed, step, stream, cell, draw). Parallel evaluation order therefore
// cannot change any result, and batch members on distinct streams are
// independent by construction.
//
// The generator chains a splitmix64-style avalanche mixer over the five
// counter words. It is not cryptographic; it passes the uniformity sanity
// checks in the test suite.
#pragma once

#include <cstdint>

namespace emberline {

struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::uint64_t stream = 0;
};

// Draw domains keep unrelated consumers of the same key from colliding.
inline constexpr std::uint64_t kDrawFireEvent = 0;  // per-cell ignition / continuation
inline constexpr std::uint64_t kDrawEnvSetup = 1;   // episode initialization
inline constexpr std::uint64_t kDrawPolicy = 2;     // action sampling
inline constexpr std::uint64_t kDrawSynthesis = 3;  // synthetic environment layers

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}
}  // namespace detail

inline std::uint64_t rng_word(const RngKey& key, std::uint64_t cell, std::uint64_t draw) {
  using detail::mix64;
  std::uint64_t h = mix64(0x243F6A8885A308D3ull ^ key.seed);
  h = mix64(h ^ key.stream);
  h = mix64(h ^ key.step);
  h = mix64(h ^ cell);
  h = mix64(h ^ draw);
  return h;
}

// Uniform double in [0, 1) with 53-bit resolution.
inline double rng_uniform(const RngKey& key, std::uint64_t cell, std::uint64_t draw) {
  return static_cast<double>(rng_word(key, cell, draw) >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Requires n >= 1.
inline std::uint64_t rng_below(const RngKey& key, std::uint64_t cell, std::uint64_t draw,
                               std::uint64_t n) {
  const auto v = static_cast<std::uint64_t>(rng_uniform(key, cell, draw) * static_cast<double>(n));
  return v < n ? v : n - 1;
}

}  // namespace emberline
