#include "otakey/adversary.hpp"

#include "otakey/errors.hpp"

namespace otakey {

namespace {

BigReal power_of(const PrimeInput& p, const BigReal& exponent, const BigReal& log_p,
                 const PrecisionContext& ctx) {
  if (exponent == BigReal(1)) return BigReal(p.value());
  return exp(mul(exponent, log_p, ctx), ctx);
}

// Per-prime overlap between p^legit and p^eve.
int term_overlap(const PrimeInput& p, const ExponentTerm& t, const BigReal& log_p,
                 const PrecisionContext& ctx) {
  if (t.legit_exponent.sign() <= 0) return -1;
  return leading_digit_overlap(power_of(p, t.legit_exponent, log_p, ctx),
                               power_of(p, t.eve_exponent, log_p, ctx));
}

// Shared tail of every attack: E_r, discrepancy and digit overlaps.
void finish_report(EveReport& report, std::span<const PrimeInput> primes, const PrecisionContext& ctx) {
  std::vector<PrimeInput> used;
  std::vector<BigReal> eve, legit;
  for (auto& t : report.terms) {
    const auto& p = primes[static_cast<std::size_t>(t.user)];
    used.push_back(p);
    eve.push_back(t.eve_exponent);
    legit.push_back(t.legit_exponent);
    t.digit_overlap = term_overlap(p, t, ln(BigReal(p.value()), ctx), ctx);
  }
  report.error_factor = error_factor(used, eve, legit, ctx);
  report.abs_discrepancy = sub(report.psi_legit, report.psi_eve, ctx).abs();
  report.digit_overlap = report.psi_legit.sign() > 0 && report.psi_eve.sign() > 0
                             ? leading_digit_overlap(report.psi_legit, report.psi_eve)
                             : 0;
}

EveReport intercept_round(const HmacRoundRecord& round, std::span<const PrimeInput> primes,
                          const ChannelState& ch, const CsiEstimate& csi, const PrecisionContext& ctx) {
  EveReport report;
  report.mode = EveMode::kSingleRound;
  report.target_receiver = round.receiver;
  const int j = round.receiver;
  for (const auto& tx : round.signals) {
    const BigReal& estimate = csi.estimate(tx.sender, j);
    report.terms.push_back({tx.sender, div(ch.eve_gain(tx.sender), estimate, ctx),
                            div(ch.gain(tx.sender, j), estimate, ctx), 0});
  }
  Rng unused(0);
  BigReal y_eve = eve_observe(round.signals, ch, unused, ctx, /*with_noise=*/false);
  report.psi_eve = exp(y_eve, ctx);
  report.psi_legit = round.post_value;
  finish_report(report, primes, ctx);
  try {
    RoundedInteger mine = recover_integer(report.psi_eve, ctx);
    report.observation_recovered = round.recovered && mine.value == *round.recovered;
  } catch (const Error& e) {
    report.eve_failure = e.what();
  }
  return report;
}

}  // namespace

std::string eve_mode_name(EveMode mode) {
  switch (mode) {
    case EveMode::kSingleRound:
      return "single";
    case EveMode::kTwoRound:
      return "two_round";
    case EveMode::kFullDuplex:
      return "full";
  }
  return "unknown";
}

EveMode parse_eve_mode(const std::string& name) {
  if (name == "single") return EveMode::kSingleRound;
  if (name == "two_round") return EveMode::kTwoRound;
  if (name == "full") return EveMode::kFullDuplex;
  throw ParseError("unknown eavesdropper mode '" + name + "'");
}

std::vector<BigReal> EveReport::ratios() const {
  std::vector<BigReal> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(t.eve_exponent);
  return out;
}

BigReal error_factor(std::span<const PrimeInput> primes, std::span<const BigReal> eve_exponents,
                     std::span<const BigReal> legit_exponents, const PrecisionContext& ctx) {
  if (primes.size() != eve_exponents.size() || primes.size() != legit_exponents.size()) {
    throw NonPositiveInput("error_factor needs one exponent pair per prime");
  }
  BigReal sum;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    BigReal delta = eve_exponents[i] - legit_exponents[i];
    if (delta.is_zero()) continue;
    sum = add(sum, mul(delta, ln(BigReal(primes[i].value()), ctx), ctx), ctx);
  }
  return sub(BigReal(1), exp(sum, ctx), ctx);
}

BigReal error_factor(std::span<const PrimeInput> primes, std::span<const BigReal> ratios,
                     const PrecisionContext& ctx) {
  std::vector<BigReal> ones(ratios.size(), BigReal(1));
  return error_factor(primes, ratios, ones, ctx);
}

EveReport eve_attack_half(const HmacRoundRecord& round, std::span<const PrimeInput> primes,
                          const ChannelState& ch, const CsiEstimate& csi, const PrecisionContext& ctx) {
  return intercept_round(round, primes, ch, csi, ctx);
}

EveReport eve_attack_two_round(const HmacRoundRecord& first, const HmacRoundRecord& second,
                               std::span<const PrimeInput> primes, const ChannelState& ch,
                               const CsiEstimate& csi, const PrecisionContext& ctx) {
  if (first.receiver == second.receiver) {
    throw NonPositiveInput("two-round interception needs two different listeners");
  }
  EveReport a = intercept_round(first, primes, ch, csi, ctx);
  EveReport b = intercept_round(second, primes, ch, csi, ctx);
  a.mode = EveMode::kTwoRound;
  try {
    RoundedInteger va = recover_integer(a.psi_eve, ctx);
    RoundedInteger vb = recover_integer(b.psi_eve, ctx);
    mpz_class guess;
    mpz_lcm(guess.get_mpz_t(), va.value.get_mpz_t(), vb.value.get_mpz_t());
    a.key_equal = guess == product_of(primes);
  } catch (const Error& e) {
    a.eve_failure = e.what();
  }
  return a;
}

EveReport eve_attack_full(const FullDuplexRound& round, std::span<const PrimeInput> primes,
                          const ChannelState& ch, const PrecisionContext& ctx, int target,
                          const FactorOptions& factor) {
  if (target < 0 || target >= static_cast<int>(round.observations.size())) {
    throw NonPositiveInput("target receiver out of range");
  }
  EveReport report;
  report.mode = EveMode::kFullDuplex;
  report.target_receiver = target;
  report.integer_channel = true;
  for (const auto& tx : round.signals) {
    const int i = tx.sender;
    BigReal legit = i == target ? BigReal() : div(ch.gain(i, target), ch.h_star(), ctx);
    BigReal r = div(ch.eve_gain(i), ch.h_star(), ctx);
    if (!(BigReal(r.to_nearest_integer()) * ch.h_star() == ch.eve_gain(i))) report.integer_channel = false;
    report.terms.push_back({i, r, legit, 0});
  }
  Rng unused(0);
  BigReal y_eve = eve_observe(round.signals, ch, unused, ctx, /*with_noise=*/false);
  report.psi_eve = exp(y_eve, ctx);
  report.psi_legit = round.observations[static_cast<std::size_t>(target)].post_value;
  finish_report(report, primes, ctx);
  try {
    RoundedInteger v = recover_integer(report.psi_eve, ctx);
    Factorization f = factorize(v.value, factor);
    report.key_equal = radical(f) == product_of(primes);
    const auto& obs = round.observations[static_cast<std::size_t>(target)];
    report.observation_recovered = obs.ok() && f == obs.exponent_map;
  } catch (const Error& e) {
    report.eve_failure = e.what();
  }
  return report;
}

int first_nonzero_decimal(const BigReal& s) {
  if (s.exponent() >= 0) return 0;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(-s.exponent()));
  mpz_class sig = abs(s.significand());
  mpz_class frac = sig % scale;
  if (frac == 0) return 0;
  return static_cast<int>(-BigReal(frac, s.exponent()).adjusted_exponent());
}

DigitShiftCheck check_digit_shift(const mpz_class& n, const BigReal& s) {
  DigitShiftCheck c;
  c.position = first_nonzero_decimal(s);
  c.overlap = leading_digit_overlap(BigReal(n), BigReal(n) * s);
  c.digits = decimal_digits(n);
  return c;
}

DigitSecuritySummary digit_security_report(std::span<const EveReport> reports, int prime_digits,
                                           double r_bound) {
  DigitSecuritySummary summary;
  const PrecisionContext ctx(32);
  const BigReal slack = BigReal::from_double(r_bound - 1.0).abs();
  for (const auto& report : reports) {
    ++summary.reports;
    ++summary.overlap_histogram[report.digit_overlap];
    if (report.key_equal) ++summary.key_equal_count;
    for (const auto& t : report.terms) {
      if (t.digit_overlap < 0) continue;
      ++summary.factor_overlap_histogram[t.digit_overlap];
      BigReal v = div(t.eve_exponent, t.legit_exponent, ctx);
      if ((v - BigReal(1)).abs() <= slack) continue;
      ++summary.eligible_factors;
      if (t.digit_overlap > prime_digits - 2) ++summary.trailing_digit_violations;
    }
  }
  return summary;
}

}  // namespace otakey
