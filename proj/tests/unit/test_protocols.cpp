#include <algorithm>

#include "doctest.h"

#include "otakey/errors.hpp"
#include "otakey/fmac.hpp"
#include "otakey/hmac.hpp"

using namespace otakey;

namespace {

std::vector<PrimeInput> primes_of(std::initializer_list<long> values) {
  std::vector<PrimeInput> out;
  for (long v : values) out.push_back(PrimeInput::from_value(v));
  return out;
}

ChannelState ideal(int n) {
  Rng rng(0);
  return draw_channel(n, FadingModel::ideal(), BigReal(1), BigReal(), rng);
}

ChannelState integer_channel(const std::vector<std::vector<long>>& c, const BigReal& h_star) {
  const auto n = c.size();
  std::vector<std::vector<BigReal>> gains(n, std::vector<BigReal>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) gains[i][j] = BigReal(c[i][j]) * h_star;
    }
  }
  return ChannelState(gains, std::vector<BigReal>(n, h_star), h_star, BigReal(), FadingModel::integer(8));
}

CsiEstimate perfect(const ChannelState& ch) {
  Rng rng(0);
  return estimate_csi(ch, CsiErrorModel::perfect(), rng);
}

}  // namespace

TEST_CASE("pre_process_half examples") {
  PrecisionContext ctx(50);
  CHECK(pre_process_half(PrimeInput::from_value(2), BigReal(1), ctx) == ln(BigReal(2), ctx));
  BigReal twice = mul(BigReal(2), ln(BigReal(3), ctx), ctx);
  CHECK(pre_process_half(PrimeInput::from_value(3), BigReal::parse("0.5"), ctx) == twice);
  BigReal h = BigReal::parse("1.2345678");
  BigReal back = mul(pre_process_half(PrimeInput::from_value(7), h, ctx), h, ctx);
  CHECK((back - ln(BigReal(7), ctx)).abs() <= BigReal::parse("1e-48"));
  CHECK_THROWS_AS(pre_process_half(PrimeInput::from_value(7), BigReal(), ctx), NonPositiveGain);
  CHECK_THROWS_AS(pre_process_half(PrimeInput::from_value(7), BigReal(-1), ctx), NonPositiveGain);
}

TEST_CASE("run_round recovers the other users' product") {
  PrecisionContext ctx(50);
  Rng rng(1);
  auto primes = primes_of({2, 3, 5});
  ChannelState ch = ideal(3);
  HmacRoundRecord r = run_round(0, primes, ch, perfect(ch), ctx, rng);
  REQUIRE(r.ok());
  CHECK(*r.recovered == 15);
  CHECK(r.signals.size() == 2);
  CHECK(std::none_of(r.signals.begin(), r.signals.end(), [](const Transmission& t) { return t.sender == 0; }));
  CHECK(r.post_value == exp(r.observation, ctx));
}

TEST_CASE("run_round under rayleigh fading with perfect CSI") {
  PrecisionContext ctx(64);
  Rng rng(2);
  auto primes = primes_of({100003, 100019});
  ChannelState ch = draw_channel(2, FadingModel::rayleigh(1.0), BigReal(1), BigReal(), rng);
  HmacRoundRecord r = run_round(1, primes, ch, perfect(ch), ctx, rng);
  REQUIRE(r.ok());
  CHECK(*r.recovered == 100003);
}

TEST_CASE("CSI error makes rounds fail in a measurable fraction") {
  PrecisionContext ctx(50);
  Rng rng(3);
  int failures = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    auto primes = sample_distinct_primes(3, 6, rng);
    ChannelState ch = draw_channel(3, FadingModel::rayleigh(1.0), BigReal(1), BigReal(), rng);
    CsiEstimate csi = estimate_csi(ch, CsiErrorModel::relative(0.1), rng);
    HmacRoundRecord r = run_round(0, primes, ch, csi, ctx, rng);
    if (!r.ok()) {
      ++failures;
      CHECK_THROWS_AS(r.recovered_value(), RoundRecoveryFailure);
    }
  }
  CHECK(failures > trials / 2);
}

TEST_CASE("derive_secret_half examples") {
  HmacRoundRecord r;
  r.recovered = mpz_class(15);
  CHECK(derive_secret_half(PrimeInput::from_value(2), r) == 30);
  r.recovered = mpz_class(6);
  CHECK(derive_secret_half(PrimeInput::from_value(5), r) == 30);
  r.recovered.reset();
  r.failure = "noise";
  CHECK_THROWS_AS(derive_secret_half(PrimeInput::from_value(5), r), RoundRecoveryFailure);
}

TEST_CASE("half duplex: four 6-digit primes give the exact product") {
  PrecisionContext ctx(64);
  Rng rng(4);
  auto primes = sample_distinct_primes(4, 6, rng);
  ChannelState ch = draw_channel(4, FadingModel::rayleigh(1.0), BigReal(1), BigReal(), rng);
  ProtocolTranscript t = run_protocol_hmac(primes, ch, perfect(ch), ctx, rng);
  for (const auto& s : t.per_user_secret) {
    REQUIRE(s.has_value());
    CHECK(*s == product_of(primes));
  }
}

TEST_CASE("run_protocol_hmac examples") {
  PrecisionContext ctx(50);
  Rng rng(5);
  auto two = primes_of({2, 3});
  ChannelState ch2 = ideal(2);
  ProtocolTranscript t = run_protocol_hmac(two, ch2, perfect(ch2), ctx, rng);
  CHECK(t.rounds_used == 2);
  CHECK(t.failure_count() == 0);
  CHECK(*t.per_user_secret[0] == 6);
  CHECK(*t.per_user_secret[1] == 6);

  PrecisionContext wide(128);
  auto eight = sample_distinct_primes(8, 6, rng);
  ChannelState ch8 = draw_channel(8, FadingModel::rayleigh(1.0), BigReal(1), BigReal(), rng);
  ProtocolTranscript t8 = run_protocol_hmac(eight, ch8, perfect(ch8), wide, rng);
  CHECK(t8.rounds_used == 8);
  for (const auto& s : t8.per_user_secret) CHECK(s == product_of(eight));
  REQUIRE(t8.max_distance_to_integer().has_value());
  CHECK(*t8.max_distance_to_integer() < default_tolerance(wide));
}

TEST_CASE("noise causes recorded failures, not crashes") {
  PrecisionContext ctx(64);
  Rng rng(6);
  auto primes = sample_distinct_primes(8, 6, rng);
  ChannelState ch = draw_channel(8, FadingModel::rayleigh(1.0), BigReal(1), BigReal::parse("1e-6"), rng);
  ProtocolTranscript t = run_protocol_hmac(primes, ch, perfect(ch), ctx, rng);
  CHECK(t.rounds_used == 8);
  CHECK(t.failure_count() > 0);
  for (std::size_t j = 0; j < t.failures.size(); ++j) {
    CHECK(t.per_user_secret[j].has_value() == t.failures[j].empty());
  }
}

TEST_CASE("half duplex: every user agrees for N in 2..16 and 2-8 digit primes") {
  PrecisionContext ctx(256);
  Rng rng(7);
  for (int n = 2; n <= 16; ++n) {
    for (int digits = 2; digits <= 8; digits += 3) {
      auto primes = sample_distinct_primes(n, digits, rng);
      ChannelState ch = draw_channel(n, FadingModel::rayleigh(1.0), BigReal(1), BigReal(), rng);
      ProtocolTranscript t = run_protocol_hmac(primes, ch, perfect(ch), ctx, rng);
      CHECK(t.rounds_used == n);
      for (const auto& s : t.per_user_secret) CHECK(s == product_of(primes));
    }
  }
}

TEST_CASE("half duplex: user order does not change the secret") {
  PrecisionContext ctx(64);
  Rng rng(8);
  auto primes = sample_distinct_primes(5, 4, rng);
  ChannelState ch = draw_channel(5, FadingModel::rayleigh(1.0), BigReal(1), BigReal(), rng);
  ProtocolTranscript a = run_protocol_hmac(primes, ch, perfect(ch), ctx, rng);
  std::reverse(primes.begin(), primes.end());
  ProtocolTranscript b = run_protocol_hmac(primes, ch, perfect(ch), ctx, rng);
  CHECK(a.per_user_secret[0] == b.per_user_secret[0]);
  CHECK(a.rounds[0].observation != b.rounds[0].observation);
}

TEST_CASE("half duplex: the listener's own prime never enters its round") {
  PrecisionContext ctx(64);
  Rng rng(9);
  auto primes = sample_distinct_primes(4, 5, rng);
  ChannelState ch = draw_channel(4, FadingModel::rayleigh(1.0), BigReal(1), BigReal(), rng);
  CsiEstimate csi = perfect(ch);
  for (int j = 0; j < 4; ++j) {
    auto swapped = primes;
    swapped[static_cast<std::size_t>(j)] = PrimeInput::from_value(1000003);
    CHECK(run_round(j, primes, ch, csi, ctx, rng).recovered == run_round(j, swapped, ch, csi, ctx, rng).recovered);
  }
}

TEST_CASE("pre_process_full examples") {
  PrecisionContext ctx(50);
  CHECK(pre_process_full(PrimeInput::from_value(2), BigReal(1), ctx) == ln(BigReal(2), ctx));
  CHECK(pre_process_full(PrimeInput::from_value(3), BigReal::parse("0.5"), ctx) ==
        mul(BigReal(2), ln(BigReal(3), ctx), ctx));
  CHECK_THROWS_AS(pre_process_full(PrimeInput::from_value(3), BigReal(), ctx), NonPositiveGain);

  // h_star = 1, channel gain 3: the receiver sees 3 ln 5 = ln 125.
  ChannelState ch = integer_channel({{0, 3}, {3, 0}}, BigReal(1));
  Rng rng(0);
  std::vector<Transmission> s = {{0, pre_process_full(PrimeInput::from_value(5), BigReal(1), ctx)}};
  BigReal y = superpose(s, 1, true, ch, rng, ctx);
  CHECK(recover_integer(exp(y, ctx), ctx).value == 125);
}

TEST_CASE("run_full_round examples") {
  PrecisionContext ctx(50);
  Rng rng(1);
  auto two = primes_of({3, 5});
  FullDuplexRound r = run_full_round(two, integer_channel({{0, 2}, {2, 0}}, BigReal::parse("0.5")), ctx, rng);
  REQUIRE(r.observations[1].ok());
  CHECK(recover_integer(r.observations[1].post_value, ctx).value == 9);
  CHECK(r.observations[1].exponent_map == Factorization({{3, 2}}));

  auto three = primes_of({2, 3, 5});
  FullDuplexRound r3 = run_full_round(three, integer_channel({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, BigReal(1)), ctx, rng);
  CHECK(r3.observations[0].exponent_map == Factorization({{3, 1}, {5, 1}}));
  CHECK(*r3.observations[0].recovered_radical == 15);
}

TEST_CASE("full duplex exponent maps match the channel's c columns") {
  PrecisionContext ctx(128);
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto primes = sample_distinct_primes(3, 3, rng);
    ChannelState ch = draw_channel(3, FadingModel::integer(4), BigReal::parse("0.25"), BigReal(), rng);
    FullDuplexRound r = run_full_round(primes, ch, ctx, rng);
    for (int j = 0; j < 3; ++j) {
      const auto& obs = r.observations[static_cast<std::size_t>(j)];
      REQUIRE(obs.ok());
      std::vector<PrimePower> expected;
      for (int i = 0; i < 3; ++i) {
        if (i != j) expected.push_back({primes[static_cast<std::size_t>(i)].value(), static_cast<unsigned>(*ch.integer_ratio(i, j))});
      }
      CHECK(obs.exponent_map == Factorization(expected));
    }
  }
}

TEST_CASE("full duplex refuses non-integer fading unless asked") {
  PrecisionContext ctx(50);
  Rng rng(3);
  auto primes = primes_of({2, 3});
  ChannelState ch = draw_channel(2, FadingModel::rayleigh(1.0), BigReal(1), BigReal(), rng);
  CHECK_THROWS_AS(run_full_round(primes, ch, ctx, rng), NonPositiveGain);
  FullDuplexOptions loose;
  loose.require_integer_fading = false;
  CHECK_NOTHROW(run_full_round(primes, ch, ctx, rng, loose));
}

TEST_CASE("recover_secret_full examples") {
  FmacObservation obs;
  obs.exponent_map = Factorization({{3, 2}});
  obs.recovered_radical = radical(obs.exponent_map);
  CHECK(recover_secret_full(PrimeInput::from_value(5), obs) == 15);
  obs.exponent_map = Factorization({{3, 1}, {5, 4}});
  obs.recovered_radical = radical(obs.exponent_map);
  CHECK(recover_secret_full(PrimeInput::from_value(2), obs) == 30);
  CHECK_THROWS_AS(recover_secret_full(PrimeInput::from_value(3), obs), DuplicatePrimeDetected);
  obs.recovered_radical.reset();
  CHECK_THROWS_AS(recover_secret_full(PrimeInput::from_value(2), obs), RecoveryFailure);
}

TEST_CASE("full duplex: six 5-digit primes with c up to 8") {
  PrecisionContext ctx(256);
  Rng rng(4);
  auto primes = sample_distinct_primes(6, 5, rng);
  ChannelState ch = draw_channel(6, FadingModel::integer(8), BigReal::parse("0.125"), BigReal(), rng);
  ProtocolTranscript t = run_protocol_fmac(primes, ch, ctx, rng);
  CHECK(t.rounds_used == 1);
  for (const auto& s : t.per_user_secret) CHECK(s == product_of(primes));
}

TEST_CASE("run_protocol_fmac examples") {
  PrecisionContext ctx(50);
  Rng rng(5);
  auto two = primes_of({2, 3});
  ProtocolTranscript t = run_protocol_fmac(two, integer_channel({{0, 1}, {1, 0}}, BigReal(1)), ctx, rng);
  CHECK(t.rounds_used == 1);
  CHECK(*t.per_user_secret[0] == 6);
  CHECK(*t.per_user_secret[1] == 6);

  auto dup = primes_of({7, 7, 11});
  CHECK_THROWS_AS(run_protocol_fmac(dup, integer_channel({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, BigReal(1)), ctx, rng),
                  DuplicatePrimeDetected);
}

TEST_CASE("full duplex fails loudly when the product outgrows the precision") {
  PrecisionContext ctx(32);
  Rng rng(6);
  auto primes = sample_distinct_primes(4, 6, rng);
  ChannelState ch = draw_channel(4, FadingModel::integer(3), BigReal(1), BigReal(), rng);
  ProtocolTranscript t = run_protocol_fmac(primes, ch, ctx, rng);
  CHECK(t.failure_count() == 4);
  for (const auto& s : t.per_user_secret) CHECK(!s.has_value());
}

TEST_CASE("half duplex allows duplicate primes") {
  PrecisionContext ctx(50);
  Rng rng(7);
  auto dup = primes_of({7, 7, 11});
  ChannelState ch = ideal(3);
  ProtocolTranscript t = run_protocol_hmac(dup, ch, perfect(ch), ctx, rng);
  for (const auto& s : t.per_user_secret) CHECK(*s == 539);
}
