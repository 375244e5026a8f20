#include "otakey/rng.hpp"

#include <cmath>
#include <numbers>

namespace otakey {

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t span = hi - lo;
  if (span == ~0ULL) return engine_();
  std::uint64_t n = span + 1;
  std::uint64_t limit = ~0ULL - (~0ULL % n);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return lo + v % n;
}

mpz_class Rng::uniform_mpz(const mpz_class& lo, const mpz_class& hi) {
  mpz_class span = hi - lo + 1;
  std::size_t bits = mpz_sizeinbase(span.get_mpz_t(), 2);
  std::size_t words = (bits + 63) / 64;
  mpz_class v;
  do {
    v = 0;
    for (std::size_t i = 0; i < words; ++i) {
      v <<= 64;
      std::uint64_t w = engine_();
      mpz_class part;
      mpz_import(part.get_mpz_t(), 1, 1, sizeof w, 0, 0, &w);
      v += part;
    }
    // Trim to the bit length of the span, then reject out-of-range draws.
    mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
  } while (v >= span);
  return lo + v;
}

double Rng::normal() {
  // Box-Muller, one variate per call.
  double u1 = uniform_open();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::rayleigh(double sigma) { return sigma * std::sqrt(-2.0 * std::log(uniform_open())); }

}  // namespace otakey
