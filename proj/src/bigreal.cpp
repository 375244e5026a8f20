#include "otakey/bigreal.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "otakey/errors.hpp"

namespace otakey {

namespace {

mpz_class pow10_mpz(std::uint64_t k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
  return r;
}

int digit_count(const mpz_class& v) {
  if (v == 0) return 1;
  // mpz_sizeinbase may overshoot by one for base 10.
  std::size_t n = mpz_sizeinbase(v.get_mpz_t(), 10);
  mpz_class a = abs(v);
  if (n > 1 && a < pow10_mpz(n - 1)) --n;
  return static_cast<int>(n);
}

// Rounds |value| / 10^k half-even; `sticky` marks a nonzero tail below value.
mpz_class shift_round(const mpz_class& value, std::uint64_t k, bool sticky = false) {
  mpz_class scale = pow10_mpz(k);
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), value.get_mpz_t(), scale.get_mpz_t());
  r = abs(r);
  mpz_class twice = 2 * r;
  int c = cmp(twice, scale);
  bool up = c > 0 || (c == 0 && (sticky || mpz_odd_p(q.get_mpz_t())));
  if (up) q += (value < 0 ? -1 : 1);
  return q;
}

}  // namespace

PrecisionContext::PrecisionContext(int digits) : digits_(digits) {
  if (digits < kMinDigits) {
    throw NonPositiveInput("precision must be at least " + std::to_string(kMinDigits) +
                           " digits, got " + std::to_string(digits));
  }
}

BigReal::BigReal(long value) : significand_(value) { normalize(); }

BigReal::BigReal(const mpz_class& integer, std::int64_t exponent)
    : significand_(integer), exponent_(exponent) {
  normalize();
}

void BigReal::normalize() {
  if (significand_ == 0) {
    exponent_ = 0;
    return;
  }
  if (mpz_divisible_ui_p(significand_.get_mpz_t(), 10) == 0) return;
  // Strip trailing zeros in chunks, then one at a time.
  static const mpz_class kChunk = pow10_mpz(16);
  while (mpz_divisible_p(significand_.get_mpz_t(), kChunk.get_mpz_t())) {
    mpz_divexact(significand_.get_mpz_t(), significand_.get_mpz_t(), kChunk.get_mpz_t());
    exponent_ += 16;
  }
  while (mpz_divisible_ui_p(significand_.get_mpz_t(), 10)) {
    mpz_divexact_ui(significand_.get_mpz_t(), significand_.get_mpz_t(), 10);
    ++exponent_;
  }
}

BigReal BigReal::parse(std::string_view text) {
  std::size_t i = 0;
  auto fail = [&](const char* why) {
    throw ParseError(std::string("invalid decimal '") + std::string(text) + "': " + why);
  };
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  std::int64_t exponent = 0;
  bool any = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits += text[i++];
    any = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits += text[i++];
      --exponent;
      any = true;
    }
  }
  if (!any) fail("no digits");
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool neg_exp = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      neg_exp = text[i] == '-';
      ++i;
    }
    std::int64_t e = 0;
    bool exp_digits = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      e = e * 10 + (text[i++] - '0');
      if (e > 4 * kMaxExponent) fail("exponent out of range");
      exp_digits = true;
    }
    if (!exp_digits) fail("empty exponent");
    exponent += neg_exp ? -e : e;
  }
  if (i != text.size()) fail("trailing characters");
  mpz_class sig(digits, 10);
  if (negative) sig = -sig;
  return BigReal(sig, exponent);
}

BigReal BigReal::from_double(double value) {
  if (!std::isfinite(value)) throw ParseError("non-finite double");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return parse(buf);
}

int BigReal::precision() const { return digit_count(significand_); }

std::int64_t BigReal::adjusted_exponent() const {
  if (is_zero()) return 0;
  return exponent_ + precision() - 1;
}

BigReal BigReal::ulp(int digits) const {
  return BigReal(mpz_class(1), adjusted_exponent() - digits + 1);
}

BigReal BigReal::abs() const {
  BigReal r = *this;
  r.significand_ = ::abs(significand_);
  return r;
}

BigReal BigReal::operator-() const {
  BigReal r = *this;
  r.significand_ = -significand_;
  return r;
}

BigReal BigReal::round(int digits) const {
  int p = precision();
  if (p <= digits) return *this;
  std::uint64_t drop = static_cast<std::uint64_t>(p - digits);
  return BigReal(shift_round(significand_, drop), exponent_ + static_cast<std::int64_t>(drop));
}

mpz_class BigReal::to_nearest_integer() const {
  if (exponent_ >= 0) return significand_ * pow10_mpz(static_cast<std::uint64_t>(exponent_));
  if (adjusted_exponent() < -1) return 0;
  return shift_round(significand_, static_cast<std::uint64_t>(-exponent_));
}

double BigReal::to_double() const {
  if (is_zero()) return 0.0;
  if (adjusted_exponent() > 400) return sign() * HUGE_VAL;
  if (adjusted_exponent() < -400) return sign() * 0.0;
  return std::strtod(to_string(20).c_str(), nullptr);
}

std::string BigReal::to_string() const {
  if (is_zero()) return "0";
  std::string digits = mpz_class(::abs(significand_)).get_str();
  std::string sign = significand_ < 0 ? "-" : "";
  std::int64_t adjusted = adjusted_exponent();
  auto n = static_cast<std::int64_t>(digits.size());
  if (exponent_ >= 0 && adjusted < 40) {
    return sign + digits + std::string(static_cast<std::size_t>(exponent_), '0');
  }
  if (exponent_ < 0 && adjusted >= -7) {
    if (adjusted >= 0) {
      auto int_len = static_cast<std::size_t>(adjusted + 1);
      return sign + digits.substr(0, int_len) + "." + digits.substr(int_len);
    }
    return sign + "0." + std::string(static_cast<std::size_t>(-adjusted - 1), '0') + digits;
  }
  std::string out = sign + digits.substr(0, 1);
  if (n > 1) out += "." + digits.substr(1);
  out += adjusted < 0 ? "e-" : "e+";
  out += std::to_string(adjusted < 0 ? -adjusted : adjusted);
  return out;
}

std::string BigReal::to_string(int digits) const {
  BigReal r = round(digits);
  if (r.is_zero()) return "0";
  std::string d = mpz_class(::abs(r.significand_)).get_str();
  std::string out = (r.significand_ < 0 ? "-" : "") + d.substr(0, 1);
  if (d.size() > 1) out += "." + d.substr(1);
  std::int64_t adjusted = r.adjusted_exponent();
  out += adjusted < 0 ? "e-" : "e+";
  out += std::to_string(adjusted < 0 ? -adjusted : adjusted);
  return out;
}

namespace {

// Brings both significands to the smaller exponent.
void align(const BigReal& a, const BigReal& b, mpz_class& sa, mpz_class& sb, std::int64_t& e) {
  e = std::min(a.exponent(), b.exponent());
  sa = a.significand();
  sb = b.significand();
  if (a.exponent() > e) sa *= pow10_mpz(static_cast<std::uint64_t>(a.exponent() - e));
  if (b.exponent() > e) sb *= pow10_mpz(static_cast<std::uint64_t>(b.exponent() - e));
}

}  // namespace

BigReal operator+(const BigReal& a, const BigReal& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  mpz_class sa, sb;
  std::int64_t e;
  align(a, b, sa, sb, e);
  return BigReal(sa + sb, e);
}

BigReal operator-(const BigReal& a, const BigReal& b) { return a + (-b); }

BigReal operator*(const BigReal& a, const BigReal& b) {
  return BigReal(a.significand() * b.significand(), a.exponent() + b.exponent());
}

std::strong_ordering operator<=>(const BigReal& a, const BigReal& b) {
  if (a.sign() != b.sign()) return a.sign() <=> b.sign();
  if (a.sign() == 0) return std::strong_ordering::equal;
  auto flip = [&](std::strong_ordering o) {
    if (a.sign() > 0) return o;
    return 0 <=> o;
  };
  if (a.adjusted_exponent() != b.adjusted_exponent()) {
    return flip(a.adjusted_exponent() <=> b.adjusted_exponent());
  }
  mpz_class sa, sb;
  std::int64_t e;
  align(a.abs(), b.abs(), sa, sb, e);
  int c = cmp(sa, sb);
  return flip(c <=> 0);
}

BigReal add(const BigReal& a, const BigReal& b, const PrecisionContext& ctx) {
  if (a.is_zero()) return b.round(ctx);
  if (b.is_zero()) return a.round(ctx);
  const BigReal& big = a.adjusted_exponent() >= b.adjusted_exponent() ? a : b;
  const BigReal& small = &big == &a ? b : a;
  std::int64_t gap_limit = std::max<std::int64_t>(big.precision(), ctx.digits()) + 3;
  if (big.adjusted_exponent() - small.adjusted_exponent() > gap_limit) {
    // The small operand only matters as a sticky bit below the rounding point.
    BigReal sticky(mpz_class(small.sign()), big.adjusted_exponent() - gap_limit);
    return (big + sticky).round(ctx);
  }
  return (a + b).round(ctx);
}

BigReal sub(const BigReal& a, const BigReal& b, const PrecisionContext& ctx) {
  return add(a, -b, ctx);
}

BigReal mul(const BigReal& a, const BigReal& b, const PrecisionContext& ctx) {
  return (a * b).round(ctx);
}

BigReal div(const BigReal& a, const BigReal& b, int digits) {
  if (b.is_zero()) throw NonPositiveInput("division by zero");
  if (a.is_zero()) return a;
  // Scale so the integer quotient carries at least digits + 2 digits.
  std::int64_t shift = digits + 2 + b.precision() - a.precision() + 1;
  if (shift < 0) shift = 0;
  mpz_class num = abs(a.significand()) * pow10_mpz(static_cast<std::uint64_t>(shift));
  mpz_class den = abs(b.significand());
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  q *= 10;
  if (r != 0) q += 1;
  if (a.sign() * b.sign() < 0) q = -q;
  return BigReal(q, a.exponent() - b.exponent() - shift - 1).round(digits);
}

BigReal div(const BigReal& a, const BigReal& b, const PrecisionContext& ctx) {
  return div(a, b, ctx.digits());
}

BigReal pow10(std::int64_t k) { return BigReal(mpz_class(1), k); }

}  // namespace otakey
