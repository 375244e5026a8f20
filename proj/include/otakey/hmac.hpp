#pragma once

// Half-duplex group key generation: N listening rounds over the
// multiple-access channel.

#include <span>

#include "otakey/protocol.hpp"

namespace otakey {

// ln(p) / h_hat. Throws NonPositiveGain for h_hat <= 0.
BigReal pre_process_half(const PrimeInput& p, const BigReal& h_hat, const PrecisionContext& ctx);

// Round with user j listening. Recovery failures (noise, CSI error,
// exhausted precision) are recorded in the returned record, not thrown.
HmacRoundRecord run_round(int j, std::span<const PrimeInput> primes, const ChannelState& ch,
                          const CsiEstimate& csi, const PrecisionContext& ctx, Rng& rng);

// S = p_own * recovered. Throws RoundRecoveryFailure if the round failed.
mpz_class derive_secret_half(const PrimeInput& p_own, const HmacRoundRecord& round);

// Every user listens once, in index order, over the same static channel.
// Duplicate primes are allowed here (the product is still well defined).
ProtocolTranscript run_protocol_hmac(std::span<const PrimeInput> primes, const ChannelState& ch,
                                     const CsiEstimate& csi, const PrecisionContext& ctx, Rng& rng);

}  // namespace otakey
