#pragma once

#include <cstdint>
#include <random>

#include <gmpxx.h>

namespace otakey {

// SplitMix64 finalizer; used both as a stream mixer and for child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based child seed: depends only on (parent, index), never on the
// order in which children are requested.
constexpr std::uint64_t child_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Seeded generator with platform-independent derived distributions.
// std::*_distribution output is implementation defined, so the variates
// used by the simulator are computed here from raw 64-bit draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_open() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], unbiased by rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

  // Uniform integer in [lo, hi] for arbitrary-size bounds.
  mpz_class uniform_mpz(const mpz_class& lo, const mpz_class& hi);

  double normal();

  // Rayleigh magnitude with scale sigma: mean sigma * sqrt(pi / 2).
  double rayleigh(double sigma);

  Rng child(std::uint64_t index) { return Rng(child_seed(engine_(), index)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace otakey
