#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "otakey/bigreal.hpp"
#include "otakey/rng.hpp"

namespace otakey {

// A prime together with its decimal length. Only constructible through
// checked paths, so holding one means the invariants hold.
class PrimeInput {
 public:
  // Throws NonPositiveInput if `value` is not prime.
  static PrimeInput from_value(const mpz_class& value);

  const mpz_class& value() const { return value_; }
  int digit_count() const { return digit_count_; }

  friend bool operator==(const PrimeInput& a, const PrimeInput& b) { return a.value_ == b.value_; }

 private:
  PrimeInput(mpz_class value, int digits) : value_(std::move(value)), digit_count_(digits) {}

  mpz_class value_;
  int digit_count_ = 0;
};

// Exact below 2^64 (fixed witness set); above that, 32 Miller-Rabin rounds
// with pseudo-random bases for an error probability below 2^-64.
bool is_probable_prime(const mpz_class& n);

int decimal_digits(const mpz_class& n);

// Uniform over primes with exactly `digit_count` digits.
PrimeInput sample_prime(int digit_count, Rng& rng);

// `count` pairwise distinct primes; duplicates are redrawn and counted in
// `collisions` when given.
std::vector<PrimeInput> sample_distinct_primes(int count, int digit_count, Rng& rng,
                                               int* collisions = nullptr);

struct PrimePower {
  mpz_class prime;
  unsigned exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

class Factorization {
 public:
  Factorization() = default;
  // Sorts and merges; throws NonPositiveInput on a zero exponent or a
  // non-positive prime.
  explicit Factorization(std::vector<PrimePower> factors);

  const std::vector<PrimePower>& factors() const { return factors_; }
  bool empty() const { return factors_.empty(); }
  std::size_t size() const { return factors_.size(); }

  // Product of prime^exponent.
  mpz_class value() const;

  // `p1^e1 * p2^e2 * ...`, ascending.
  std::string to_string() const;
  static Factorization parse(std::string_view text);

  friend bool operator==(const Factorization&, const Factorization&) = default;

 private:
  std::vector<PrimePower> factors_;
};

struct FactorOptions {
  std::uint64_t trial_bound = 10'000;
  // Pollard-rho iterations allowed for splitting any one composite cofactor.
  std::uint64_t rho_budget = 1ULL << 22;
  std::uint64_t rng_seed = 0x5eed;
};

// Trial division, then Brent's variant of Pollard rho. Throws
// NonPositiveInput for n < 2 and FactorBoundExceeded when a cofactor
// survives the budget.
Factorization factorize(const mpz_class& n, const FactorOptions& options = {});

mpz_class radical(const Factorization& f);

struct RoundedInteger {
  mpz_class value;
  BigReal distance;  // |x - value|
};

// Nearest positive integer to x if it lies within tol. Throws
// NotNearInteger otherwise and NonPositiveInput when tol <= 0.
RoundedInteger round_to_integer(const BigReal& x, const BigReal& tol);

// 10^-ctx.tolerance_digits()
BigReal default_tolerance(const PrecisionContext& ctx);

// round_to_integer with the context's tolerance, after refusing (Overflow)
// values too large to be resolved as integers at ctx precision.
RoundedInteger recover_integer(const BigReal& x, const PrecisionContext& ctx);

// Number of leading decimal digits shared by a and b. Zero when the decimal
// exponents differ. Digits are compared over the longer of the two
// significands (and at least the integer part), padding with zeros.
int leading_digit_overlap(const BigReal& a, const BigReal& b);

}  // namespace otakey
