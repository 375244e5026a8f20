#include "otakey/fmac.hpp"

#include <algorithm>

#include "otakey/errors.hpp"

namespace otakey {

BigReal pre_process_full(const PrimeInput& p, const BigReal& h_star, const PrecisionContext& ctx) {
  if (h_star.sign() <= 0) throw NonPositiveGain("h_star must be positive, got " + h_star.to_string());
  return div(ln(BigReal(p.value()), ctx), h_star, ctx);
}

FullDuplexRound run_full_round(std::span<const PrimeInput> primes, const ChannelState& ch,
                               const PrecisionContext& ctx, Rng& rng,
                               const FullDuplexOptions& options) {
  const int n = ch.n_users();
  if (static_cast<int>(primes.size()) != n) throw NonPositiveInput("one prime per user is required");
  if (options.require_integer_fading && !ch.has_integer_fading()) {
    throw NonPositiveGain("full-duplex exchange needs every gain to be an integer multiple of h_star");
  }
  FullDuplexRound round;
  for (int i = 0; i < n; ++i) {
    round.signals.push_back({i, pre_process_full(primes[static_cast<std::size_t>(i)], ch.h_star(), ctx)});
  }
  for (int j = 0; j < n; ++j) {
    FmacObservation obs;
    obs.receiver = j;
    obs.observation = superpose(round.signals, j, /*exclude_self=*/true, ch, rng, ctx);
    try {
      obs.post_value = exp(obs.observation, ctx);
      RoundedInteger r = recover_integer(obs.post_value, ctx);
      obs.distance_to_integer = r.distance;
      if (r.value < 2) throw NotNearInteger("observation rounds to 1; nothing to factor");
      obs.exponent_map = factorize(r.value, options.factor);
      obs.recovered_radical = radical(obs.exponent_map);
    } catch (const Error& e) {
      obs.failure = e.what();
    }
    round.observations.push_back(std::move(obs));
  }
  return round;
}

mpz_class recover_secret_full(const PrimeInput& p_own, const FmacObservation& obs) {
  if (!obs.ok()) {
    throw RecoveryFailure("receiver " + std::to_string(obs.receiver) + " failed: " + obs.failure);
  }
  const auto& factors = obs.exponent_map.factors();
  if (std::any_of(factors.begin(), factors.end(),
                  [&](const PrimePower& f) { return f.prime == p_own.value(); })) {
    throw DuplicatePrimeDetected("receiver " + std::to_string(obs.receiver) + " sees its own prime " +
                                 p_own.value().get_str() + " from another user");
  }
  return p_own.value() * *obs.recovered_radical;
}

ProtocolTranscript run_protocol_fmac(std::span<const PrimeInput> primes, const ChannelState& ch,
                                     const PrecisionContext& ctx, Rng& rng,
                                     const FullDuplexOptions& options) {
  require_distinct(primes);
  ProtocolTranscript t;
  t.protocol = Protocol::kFullDuplex;
  t.full_round = run_full_round(primes, ch, ctx, rng, options);
  t.rounds_used = 1;
  const auto n = primes.size();
  t.per_user_secret.resize(n);
  t.failures.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& obs = t.full_round->observations[j];
    if (obs.ok()) {
      t.per_user_secret[j] = recover_secret_full(primes[j], obs);
    } else {
      t.failures[j] = obs.failure;
    }
  }
  return t;
}

}  // namespace otakey
