#include "otakey/hmac.hpp"

#include "otakey/errors.hpp"

namespace otakey {

namespace {

std::vector<BigReal> logs_of(std::span<const PrimeInput> primes, const PrecisionContext& ctx) {
  std::vector<BigReal> logs;
  logs.reserve(primes.size());
  for (const auto& p : primes) logs.push_back(ln(BigReal(p.value()), ctx));
  return logs;
}

BigReal divide_by_gain(const BigReal& log_p, const BigReal& h_hat, const PrecisionContext& ctx) {
  if (h_hat.sign() <= 0) throw NonPositiveGain("gain estimate must be positive, got " + h_hat.to_string());
  return div(log_p, h_hat, ctx);
}

HmacRoundRecord listen(int j, std::span<const BigReal> logs, const ChannelState& ch,
                       const CsiEstimate& csi, const PrecisionContext& ctx, Rng& rng) {
  HmacRoundRecord rec;
  rec.receiver = j;
  for (int i = 0; i < static_cast<int>(logs.size()); ++i) {
    if (i == j) continue;
    rec.signals.push_back({i, divide_by_gain(logs[static_cast<std::size_t>(i)], csi.estimate(i, j), ctx)});
  }
  rec.observation = superpose(rec.signals, j, /*exclude_self=*/true, ch, rng, ctx);
  try {
    rec.post_value = exp(rec.observation, ctx);
    RoundedInteger r = recover_integer(rec.post_value, ctx);
    rec.recovered = r.value;
    rec.distance_to_integer = r.distance;
  } catch (const Error& e) {
    rec.failure = e.what();
  }
  return rec;
}

}  // namespace

BigReal pre_process_half(const PrimeInput& p, const BigReal& h_hat, const PrecisionContext& ctx) {
  if (h_hat.sign() <= 0) throw NonPositiveGain("gain estimate must be positive, got " + h_hat.to_string());
  return divide_by_gain(ln(BigReal(p.value()), ctx), h_hat, ctx);
}

HmacRoundRecord run_round(int j, std::span<const PrimeInput> primes, const ChannelState& ch,
                          const CsiEstimate& csi, const PrecisionContext& ctx, Rng& rng) {
  if (static_cast<int>(primes.size()) != ch.n_users()) {
    throw NonPositiveInput("one prime per user is required");
  }
  if (j < 0 || j >= ch.n_users()) throw NonPositiveInput("receiver index out of range");
  auto logs = logs_of(primes, ctx);
  return listen(j, logs, ch, csi, ctx, rng);
}

mpz_class derive_secret_half(const PrimeInput& p_own, const HmacRoundRecord& round) {
  return p_own.value() * round.recovered_value();
}

ProtocolTranscript run_protocol_hmac(std::span<const PrimeInput> primes, const ChannelState& ch,
                                     const CsiEstimate& csi, const PrecisionContext& ctx, Rng& rng) {
  const int n = ch.n_users();
  if (static_cast<int>(primes.size()) != n) throw NonPositiveInput("one prime per user is required");
  auto logs = logs_of(primes, ctx);

  ProtocolTranscript t;
  t.protocol = Protocol::kHalfDuplex;
  t.per_user_secret.resize(static_cast<std::size_t>(n));
  t.failures.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    t.rounds.push_back(listen(j, logs, ch, csi, ctx, rng));
    ++t.rounds_used;
    const auto& round = t.rounds.back();
    auto slot = static_cast<std::size_t>(j);
    if (round.ok()) {
      t.per_user_secret[slot] = derive_secret_half(primes[slot], round);
    } else {
      t.failures[slot] = round.failure;
    }
  }
  return t;
}

}  // namespace otakey
