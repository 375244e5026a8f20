// ln and exp for BigReal.
//
// Both run in binary fixed point (an mpz scaled by 2^bits) at roughly 1.5x
// the requested decimal precision, then round once into the decimal result.

#include <cmath>
#include <mutex>

#include "otakey/bigreal.hpp"
#include "otakey/errors.hpp"

namespace otakey {

namespace {

constexpr double kBitsPerDigit = 3.321928094887362;

mpz_class pow10_mpz(std::uint64_t k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
  return r;
}

long working_bits(long digits) {
  return static_cast<long>(std::ceil(static_cast<double>(digits) * kBitsPerDigit)) + 32;
}

// round(x * 2^bits)
mpz_class to_fixed(const BigReal& x, long bits) {
  if (x.is_zero()) return 0;
  // Far below one unit of the fixed-point scale.
  if (x.adjusted_exponent() < -static_cast<std::int64_t>(bits / 3) - 4) return 0;
  mpz_class v = x.significand();
  v <<= bits;
  if (x.exponent() >= 0) return v * pow10_mpz(static_cast<std::uint64_t>(x.exponent()));
  mpz_class d = pow10_mpz(static_cast<std::uint64_t>(-x.exponent()));
  mpz_class q;
  mpz_class twice = 2 * v + (v >= 0 ? d : mpz_class(-d));
  mpz_class den = 2 * d;
  mpz_tdiv_q(q.get_mpz_t(), twice.get_mpz_t(), den.get_mpz_t());
  return q;
}

// fixed / 2^bits rounded to `digits` significant decimals, times 10^shift10.
BigReal from_fixed(const mpz_class& fixed, long bits, int digits, std::int64_t shift10 = 0) {
  if (fixed == 0) return BigReal();
  mpz_class mag = abs(fixed);
  long int_bits = static_cast<long>(mpz_sizeinbase(mag.get_mpz_t(), 2)) - bits;
  long int_digits = static_cast<long>(std::floor(static_cast<double>(int_bits) / kBitsPerDigit));
  long k = digits + 4 - int_digits;
  mpz_class q, r;
  if (k >= 0) {
    mpz_class num = mag * pow10_mpz(static_cast<std::uint64_t>(k));
    mpz_fdiv_q_2exp(q.get_mpz_t(), num.get_mpz_t(), bits);
    mpz_fdiv_r_2exp(r.get_mpz_t(), num.get_mpz_t(), bits);
  } else {
    mpz_class shifted;
    mpz_fdiv_q_2exp(shifted.get_mpz_t(), mag.get_mpz_t(), bits);
    mpz_class den = pow10_mpz(static_cast<std::uint64_t>(-k));
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), shifted.get_mpz_t(), den.get_mpz_t());
  }
  // Append a sticky digit so the final decimal rounding sees any remainder.
  q *= 10;
  if (r != 0) q += 1;
  if (fixed < 0) q = -q;
  return BigReal(q, shift10 - k - 1).round(digits);
}

// 2 * atanh(1 / d) at 2^-bits.
mpz_class two_atanh_inverse(unsigned long d, long bits) {
  mpz_class power = mpz_class(1) << bits;
  power /= d;
  mpz_class sum = power;
  unsigned long d2 = d * d;
  for (unsigned long k = 3; power != 0; k += 2) {
    power /= d2;
    sum += power / k;
  }
  return 2 * sum;
}

struct ConstantCache {
  std::mutex mutex;
  long bits = 0;
  mpz_class ln2;
  mpz_class ln10;
};

ConstantCache& constants() {
  static ConstantCache cache;
  return cache;
}

// ln 2 and ln 10 at 2^-bits, truncated from a cached wider value.
void log_constants(long bits, mpz_class& ln2, mpz_class& ln10) {
  ConstantCache& cache = constants();
  std::lock_guard<std::mutex> lock(cache.mutex);
  if (cache.bits < bits + 16) {
    long target = std::max(bits + 16, cache.bits * 2);
    long wide = target + 32;
    mpz_class l2 = two_atanh_inverse(3, wide);
    // 10 = 2^3 * 1.25 and ln 1.25 = 2 atanh(1/9)
    mpz_class l10 = 3 * l2 + two_atanh_inverse(9, wide);
    cache.ln2 = l2 >> 32;
    cache.ln10 = l10 >> 32;
    cache.bits = target;
  }
  ln2 = cache.ln2 >> (cache.bits - bits);
  ln10 = cache.ln10 >> (cache.bits - bits);
}

mpz_class fixed_mul(const mpz_class& a, const mpz_class& b, long bits) {
  mpz_class r = a * b;
  mpz_tdiv_q_2exp(r.get_mpz_t(), r.get_mpz_t(), bits);
  return r;
}

}  // namespace

BigReal exp(const BigReal& x, const PrecisionContext& ctx) {
  if (x.is_zero()) return BigReal(1);
  const int digits = ctx.digits();
  // |x| >= 1e10 puts the result exponent far outside the supported range.
  if (x.adjusted_exponent() >= 10) {
    throw Overflow("exp argument " + x.to_string(20) + " out of range");
  }
  const long bits = working_bits(digits + digits / 2 + 10);
  // The reduction x = k ln10 + r needs ~34 extra bits since |k| < 2^32.
  const long wide = bits + 40;
  mpz_class ln2, ln10;
  log_constants(wide, ln2, ln10);

  mpz_class xf = to_fixed(x, wide);
  mpz_class k;
  {
    mpz_class num = 2 * xf + ln10;
    mpz_class den = 2 * ln10;
    mpz_fdiv_q(k.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  }
  if (abs(k) > kMaxExponent) {
    throw Overflow("exp(" + x.to_string(20) + ") exceeds the exponent bound");
  }
  mpz_class reduced = xf - k * ln10;
  mpz_tdiv_q_2exp(reduced.get_mpz_t(), reduced.get_mpz_t(), wide - bits);

  // exp(r) = exp(r / 2^m)^(2^m); squaring doubles the relative error each
  // time, hence the extra m bits.
  const long halvings = std::max(8L, static_cast<long>(std::sqrt(static_cast<double>(bits)) / 2));
  const long series_bits = bits + 2 * halvings + 16;
  mpz_class r = reduced << (halvings + 16);  // value reduced / 2^halvings

  mpz_class one = mpz_class(1) << series_bits;
  mpz_class sum = one;
  mpz_class term = one;
  for (unsigned long n = 1;; ++n) {
    term = fixed_mul(term, r, series_bits);
    mpz_tdiv_q_ui(term.get_mpz_t(), term.get_mpz_t(), n);
    if (term == 0) break;
    sum += term;
  }
  for (long i = 0; i < halvings; ++i) sum = fixed_mul(sum, sum, series_bits);

  return from_fixed(sum, series_bits, digits, k.get_si());
}

BigReal ln(const BigReal& x, const PrecisionContext& ctx) {
  if (x.sign() <= 0) throw NonPositiveInput("ln of non-positive value " + x.to_string(20));
  if (x == BigReal(1)) return BigReal();
  const int digits = ctx.digits();
  const std::int64_t decade = x.adjusted_exponent();

  // Near 1 the result is small and fixed point needs extra digits to keep
  // the relative error bounded.
  long extra = 0;
  if (decade == 0 || decade == -1) {
    BigReal t = x - BigReal(1);
    extra = std::max<long>(0, static_cast<long>(-t.adjusted_exponent()));
  }
  const long bits = working_bits(digits + digits / 2 + 10 + extra);

  // x = f * 10^decade with f in [1, 10), then f = 2^j * g with g near 1.
  BigReal f(x.significand(), x.exponent() - decade);
  double fd = f.to_double();
  long j = std::lround(std::log2(fd));
  const long sqrt_count = std::max(4L, static_cast<long>(std::sqrt(static_cast<double>(bits) / 2)));
  const long series_bits = bits + sqrt_count + 24;

  mpz_class g = to_fixed(f, series_bits + 4);
  mpz_tdiv_q_2exp(g.get_mpz_t(), g.get_mpz_t(), j + 4);

  // ln g = 2^s ln(g^(1/2^s))
  for (long i = 0; i < sqrt_count; ++i) {
    g <<= series_bits;
    mpz_sqrt(g.get_mpz_t(), g.get_mpz_t());
  }
  mpz_class one = mpz_class(1) << series_bits;
  mpz_class z = (g - one) << series_bits;
  mpz_class den = g + one;
  mpz_tdiv_q(z.get_mpz_t(), z.get_mpz_t(), den.get_mpz_t());

  // atanh(z) = z + z^3/3 + z^5/5 + ...
  mpz_class z2 = fixed_mul(z, z, series_bits);
  mpz_class power = z;
  mpz_class sum = z;
  for (unsigned long k = 3;; k += 2) {
    power = fixed_mul(power, z2, series_bits);
    if (power == 0) break;
    mpz_class term;
    mpz_tdiv_q_ui(term.get_mpz_t(), power.get_mpz_t(), k);
    sum += term;
  }
  mpz_class ln_g = sum << (sqrt_count + 1);

  // |decade| < 2^32 after the exponent bound; widen for the multiple.
  const long wide = series_bits + 40;
  mpz_class ln2, ln10;
  log_constants(wide, ln2, ln10);
  mpz_class total = (ln_g << 40) + ln2 * j + ln10 * static_cast<long>(decade);
  return from_fixed(total, wide, digits);
}

}  // namespace otakey
