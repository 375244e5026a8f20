#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace otakey {

// Significant decimal digits used for real arithmetic. Rounding is always
// round-half-even.
class PrecisionContext {
 public:
  static constexpr int kMinDigits = 16;

  explicit PrecisionContext(int digits);

  int digits() const { return digits_; }

  // Default closeness tolerance for integer recovery: 10^-(digits / 4).
  int tolerance_digits() const { return (digits_ + 3) / 4; }

  // Integers whose magnitude reaches 10^(digits - guard) are refused by
  // integer recovery; at that size the accumulated ulp error is no longer
  // small against the tolerance.
  int guard_digits() const { return tolerance_digits() + 4; }

  friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;

 private:
  int digits_;
};

// Arbitrary precision decimal floating point: sign * significand * 10^exponent.
//
// Values are kept canonical (no trailing zeros in the significand, zero has a
// single representation), so structural equality is numeric equality.
// Arithmetic operators are exact; the context-taking functions round.
class BigReal {
 public:
  BigReal() = default;
  BigReal(long value);  // NOLINT(google-explicit-constructor)
  explicit BigReal(const mpz_class& integer, std::int64_t exponent = 0);

  // Parses `[+-]digits[.digits][e[+-]digits]`.
  static BigReal parse(std::string_view text);

  // Shortest round-tripping decimal form of a double (17 significant digits).
  static BigReal from_double(double value);

  int sign() const { return sgn(significand_); }
  bool is_zero() const { return significand_ == 0; }

  // Signed significand and power-of-ten exponent of the canonical form.
  const mpz_class& significand() const { return significand_; }
  std::int64_t exponent() const { return exponent_; }

  // Number of digits in the significand.
  int precision() const;

  // Exponent of the most significant digit: floor(log10(|x|)). Zero maps to 0.
  std::int64_t adjusted_exponent() const;

  // Value of one unit in the last place at `digits` significant digits.
  BigReal ulp(int digits) const;

  BigReal abs() const;
  BigReal operator-() const;

  BigReal round(int digits) const;
  BigReal round(const PrecisionContext& ctx) const { return round(ctx.digits()); }

  // Nearest integer (ties to even).
  mpz_class to_nearest_integer() const;
  bool is_integer() const { return exponent_ >= 0; }

  double to_double() const;
  std::string to_string() const;
  // Scientific form rounded to `digits` significant digits.
  std::string to_string(int digits) const;

  friend BigReal operator+(const BigReal& a, const BigReal& b);
  friend BigReal operator-(const BigReal& a, const BigReal& b);
  friend BigReal operator*(const BigReal& a, const BigReal& b);

  BigReal& operator+=(const BigReal& other) { return *this = *this + other; }
  BigReal& operator-=(const BigReal& other) { return *this = *this - other; }
  BigReal& operator*=(const BigReal& other) { return *this = *this * other; }

  friend bool operator==(const BigReal& a, const BigReal& b) {
    return a.exponent_ == b.exponent_ && a.significand_ == b.significand_;
  }
  friend std::strong_ordering operator<=>(const BigReal& a, const BigReal& b);

 private:
  void normalize();

  mpz_class significand_;
  std::int64_t exponent_ = 0;
};

BigReal add(const BigReal& a, const BigReal& b, const PrecisionContext& ctx);
BigReal sub(const BigReal& a, const BigReal& b, const PrecisionContext& ctx);
BigReal mul(const BigReal& a, const BigReal& b, const PrecisionContext& ctx);
// Throws NonPositiveInput on division by zero.
BigReal div(const BigReal& a, const BigReal& b, const PrecisionContext& ctx);
BigReal div(const BigReal& a, const BigReal& b, int digits);

// 10^k, exact.
BigReal pow10(std::int64_t k);

// Natural logarithm, within 2 ulp at ctx.digits(). Throws NonPositiveInput
// for x <= 0.
BigReal ln(const BigReal& x, const PrecisionContext& ctx);

// e^x, within 2 ulp at ctx.digits(). Throws Overflow when the decimal
// exponent of the result would leave [-kMaxExponent, kMaxExponent].
BigReal exp(const BigReal& x, const PrecisionContext& ctx);

inline constexpr std::int64_t kMaxExponent = 1'000'000'000;

}  // namespace otakey
