#include <algorithm>
#include <set>

#include "doctest.h"

#include "otakey/errors.hpp"
#include "otakey/numerics.hpp"
#include "support/mpfr_oracle.hpp"

using namespace otakey;

namespace {

bool trial_division_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

BigReal ln_int(long v, const PrecisionContext& ctx) { return ln(BigReal(v), ctx); }

// Error of `value` against the oracle, in units of the last place.
double ulp_error(const BigReal& value, const BigReal& oracle, int digits) {
  if (oracle.is_zero()) return value.is_zero() ? 0.0 : 1e300;
  BigReal diff = (value - oracle).abs();
  return div(diff, oracle.ulp(digits), 20).to_double();
}

}  // namespace

TEST_CASE("ln identities") {
  PrecisionContext ctx(50);
  CHECK(ln(BigReal(1), ctx) == BigReal());
  BigReal e = exp(BigReal(1), ctx);
  CHECK(ulp_error(ln(e, ctx), BigReal(1), 50) <= 2.0);
  CHECK_THROWS_AS(ln(BigReal(), ctx), NonPositiveInput);
  CHECK_THROWS_AS(ln(BigReal(-3), ctx), NonPositiveInput);
}

TEST_CASE("ln(100003) round-trips through exp at four times the precision") {
  PrecisionContext ctx(50);
  PrecisionContext wide(200);
  BigReal v = ln_int(100003, ctx);
  BigReal back = exp(v, wide);
  // A 2 ulp error in v (ulp 1e-48) moves exp(v) by ~2e-43.
  CHECK(back.round(46) == BigReal(100003));
  CHECK(back.to_nearest_integer() == 100003);
}

TEST_CASE("exp identities") {
  PrecisionContext ctx(50);
  CHECK(exp(BigReal(), ctx) == BigReal(1));
  BigReal six = exp(ln_int(2, ctx) + ln_int(3, ctx), ctx);
  CHECK(six.to_nearest_integer() == 6);
  BigReal nine = exp(BigReal(2) * ln_int(3, ctx), ctx);
  CHECK(nine.to_nearest_integer() == 9);
  CHECK_THROWS_AS(exp(BigReal::parse("1e10"), ctx), Overflow);
  CHECK_THROWS_AS(exp(BigReal::parse("-3e9"), ctx), Overflow);
  // Large but representable.
  CHECK(exp(BigReal(100000), ctx).adjusted_exponent() == 43429);
}

TEST_CASE("ln and exp stay within 2 ulp of a 4x precision reference") {
  Rng rng(2024);
  for (int digits : {16, 32, 50, 128, 256}) {
    PrecisionContext ctx(digits);
    double worst_ln = 0, worst_exp = 0;
    for (int i = 0; i < 60; ++i) {
      // Positive arguments across many decades, including values next to 1.
      mpz_class sig = rng.uniform_mpz(1, mpz_class("1" + std::string(40, '0'), 10));
      auto e = static_cast<std::int64_t>(rng.uniform_int(0, 120)) - 80;
      BigReal x(sig, e);
      if (i % 10 == 0) x = BigReal(1) + BigReal(sig, -60 - i);
      if (i % 10 == 1) x = BigReal(1) - BigReal(sig, -45 - i);
      BigReal got = ln(x, ctx);
      BigReal want = testing::mpfr_reference(testing::Fn::kLn, x, 4 * digits);
      worst_ln = std::max(worst_ln, ulp_error(got, want, digits));

      BigReal y(sig, -38 + static_cast<std::int64_t>(rng.uniform_int(0, 3)));
      if (rng.uniform() < 0.5) y = -y;
      BigReal got_e = exp(y, ctx);
      BigReal want_e = testing::mpfr_reference(testing::Fn::kExp, y, 4 * digits);
      worst_exp = std::max(worst_exp, ulp_error(got_e, want_e, digits));
    }
    INFO("digits=" << digits << " ln=" << worst_ln << " exp=" << worst_exp);
    CHECK(worst_ln <= 2.0);
    CHECK(worst_exp <= 2.0);
  }
}

TEST_CASE("round trip: exp(ln p + ln q) recovers p*q") {
  Rng rng(5);
  PrecisionContext ctx(50);
  for (int i = 0; i < 300; ++i) {
    PrimeInput p = sample_prime(static_cast<int>(rng.uniform_int(1, 7)), rng);
    PrimeInput q = sample_prime(static_cast<int>(rng.uniform_int(1, 7)), rng);
    BigReal y = add(ln(BigReal(p.value()), ctx), ln(BigReal(q.value()), ctx), ctx);
    RoundedInteger r = round_to_integer(exp(y, ctx), default_tolerance(ctx));
    CHECK(r.value == p.value() * q.value());
  }
}

TEST_CASE("round-trip error does not grow with precision") {
  const long primes[][2] = {{100003, 100019}, {2, 9999991}, {7, 11}, {999983, 999979}, {65537, 257}};
  double previous = 1e300;
  for (int digits : {32, 64, 128}) {
    PrecisionContext ctx(digits);
    BigReal worst;
    for (const auto& pq : primes) {
      BigReal v = exp(add(ln_int(pq[0], ctx), ln_int(pq[1], ctx), ctx), ctx);
      BigReal err = (v - BigReal(pq[0] * pq[1])).abs();
      if (err > worst) worst = err;
    }
    double w = worst.is_zero() ? 0.0 : worst.to_double();
    CHECK(w <= previous);
    previous = w;
  }
}

TEST_CASE("sample_prime") {
  SUBCASE("one digit comes from {2,3,5,7}") {
    Rng rng(1);
    std::set<long> seen;
    for (int i = 0; i < 200; ++i) seen.insert(sample_prime(1, rng).value().get_si());
    CHECK(seen == std::set<long>{2, 3, 5, 7});
  }
  SUBCASE("deterministic for a seed") {
    Rng a(42), b(42);
    PrimeInput p = sample_prime(6, a);
    CHECK(p == sample_prime(6, b));
    CHECK(p.digit_count() == 6);
    CHECK(decimal_digits(p.value()) == 6);
  }
  SUBCASE("10^4 six-digit draws pass trial division") {
    Rng rng(3);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
      PrimeInput p = sample_prime(6, rng);
      if (!trial_division_prime(p.value().get_ui()) || p.digit_count() != 6) ++bad;
    }
    CHECK(bad == 0);
  }
  Rng rng(1);
  CHECK_THROWS_AS(sample_prime(0, rng), NonPositiveInput);
}

TEST_CASE("primality agrees with trial division on small numbers") {
  for (std::uint64_t n = 0; n < 20000; ++n) {
    REQUIRE(is_probable_prime(mpz_class(static_cast<unsigned long>(n))) == trial_division_prime(n));
  }
  // Strong pseudoprimes to several small bases.
  CHECK_FALSE(is_probable_prime(mpz_class("3215031751")));
  CHECK_FALSE(is_probable_prime(mpz_class("3825123056546413051")));
  CHECK(is_probable_prime(mpz_class("18446744073709551557")));
  CHECK(is_probable_prime(mpz_class("170141183460469231731687303715884105727")));  // 2^127 - 1
  CHECK_FALSE(is_probable_prime(mpz_class("170141183460469231731687303715884105729")));
}

TEST_CASE("distinct prime sampling counts collisions") {
  Rng rng(9);
  int collisions = 0;
  auto primes = sample_distinct_primes(4, 1, rng, &collisions);
  std::set<long> values;
  for (const auto& p : primes) values.insert(p.value().get_si());
  CHECK(values.size() == 4);
  CHECK(collisions > 0);
  CHECK_THROWS_AS(sample_distinct_primes(5, 1, rng), NonPositiveInput);
}

TEST_CASE("factorize examples") {
  CHECK(factorize(360).to_string() == "2^3 * 3^2 * 5^1");
  CHECK(factorize(9) == Factorization({{3, 2}}));
  mpz_class a = 100003, b = 100019;
  mpz_class n = a * a * b * b * b;
  CHECK(factorize(n) == Factorization({{a, 2}, {b, 3}}));
  CHECK(factorize(2) == Factorization({{2, 1}}));
  CHECK_THROWS_AS(factorize(1), NonPositiveInput);
  CHECK_THROWS_AS(factorize(0), NonPositiveInput);
}

TEST_CASE("factorize reports a cofactor that resists the budget") {
  // The two smallest 30-digit primes; a tiny budget cannot split them.
  mpz_class p("100000000000000000000000000379"), q("100000000000000000000000000319");
  REQUIRE(is_probable_prime(p));
  REQUIRE(is_probable_prime(q));
  FactorOptions opts;
  opts.rho_budget = 1000;
  CHECK_THROWS_AS(factorize(p * q, opts), FactorBoundExceeded);
}

TEST_CASE("factorization completeness on random prime powers") {
  Rng rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    int count = static_cast<int>(rng.uniform_int(1, 6));
    std::vector<PrimePower> expected;
    for (const auto& p : sample_distinct_primes(count, static_cast<int>(rng.uniform_int(2, 6)), rng)) {
      expected.push_back({p.value(), static_cast<unsigned>(rng.uniform_int(1, 8))});
    }
    Factorization want(expected);
    Factorization got = factorize(want.value());
    CHECK(got == want);
    // Every radical prime divides n and the counts agree.
    mpz_class n = want.value();
    for (const auto& f : got.factors()) CHECK(mpz_divisible_p(n.get_mpz_t(), f.prime.get_mpz_t()));
    CHECK(got.size() == want.size());
  }
}

TEST_CASE("radical") {
  CHECK(radical(Factorization({{2, 3}, {3, 2}})) == 6);
  CHECK(radical(Factorization({{7, 1}})) == 7);
  CHECK(radical(factorize(9 * 625)) == 15);
}

TEST_CASE("factorization text form") {
  Factorization f({{5, 1}, {2, 3}});
  CHECK(f.to_string() == "2^3 * 5^1");
  CHECK(Factorization::parse(f.to_string()) == f);
  CHECK(Factorization::parse("  3^2*7^1 ") == Factorization({{3, 2}, {7, 1}}));
  CHECK_THROWS_AS(Factorization::parse("3*7"), ParseError);
  CHECK_THROWS_AS(Factorization({{3, 0}}), NonPositiveInput);
}

TEST_CASE("round_to_integer") {
  BigReal tol = BigReal::parse("1e-6");
  RoundedInteger r = round_to_integer(BigReal::parse("6.000000000001"), tol);
  CHECK(r.value == 6);
  CHECK(r.distance == BigReal::parse("1e-12"));
  CHECK_THROWS_AS(round_to_integer(BigReal::parse("6.4"), tol), NotNearInteger);
  CHECK_THROWS_AS(round_to_integer(BigReal::parse("0.0000000001"), tol), NotNearInteger);
  CHECK_THROWS_AS(round_to_integer(BigReal(6), BigReal()), NonPositiveInput);

  PrecisionContext ctx(50);
  BigReal y = add(ln_int(100003, ctx), ln_int(100019, ctx), ctx);
  CHECK(round_to_integer(exp(y, ctx), BigReal::parse("1e-20")).value == mpz_class(100003) * 100019);
}

TEST_CASE("recover_integer refuses values beyond the precision guard") {
  PrecisionContext ctx(32);  // tolerance 1e-8, guard 12 digits -> limit 1e20
  CHECK(recover_integer(BigReal::parse("12345678901234567890.000000001"), ctx).value ==
        mpz_class("12345678901234567890"));
  CHECK_THROWS_AS(recover_integer(BigReal::parse("1e20"), ctx), Overflow);
}

TEST_CASE("leading_digit_overlap") {
  CHECK(leading_digit_overlap(BigReal(123456), BigReal(123456)) == 6);
  CHECK(leading_digit_overlap(BigReal(123000), BigReal(123000)) == 6);
  CHECK(leading_digit_overlap(BigReal(123456), BigReal::parse("123477.357")) == 4);
  CHECK(leading_digit_overlap(BigReal(123456), BigReal(923456)) == 0);
  CHECK(leading_digit_overlap(BigReal(99999), BigReal(100001)) == 0);
  // 123456 * 1.000173 computed exactly.
  BigReal product = BigReal(123456) * BigReal::parse("1.000173");
  CHECK(product == BigReal::parse("123477.357888"));
  CHECK(leading_digit_overlap(BigReal(123456), product) == 4);
  CHECK_THROWS_AS(leading_digit_overlap(BigReal(), BigReal(1)), NonPositiveInput);
}
