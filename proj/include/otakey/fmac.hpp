#pragma once

// Full-duplex group key generation: one simultaneous exchange with integer
// fading ratios, recovered by factorization.

#include <span>

#include "otakey/protocol.hpp"

namespace otakey {

struct FullDuplexOptions {
  // Refuse channels whose gains are not exact integer multiples of h_star.
  // The quantized extension experiment turns this off.
  bool require_integer_fading = true;
  FactorOptions factor;
};

// ln(p) / h_star. Throws NonPositiveGain for h_star <= 0.
BigReal pre_process_full(const PrimeInput& p, const BigReal& h_star, const PrecisionContext& ctx);

// All users transmit and receive at once; each receiver cancels its own term,
// exponentiates and factorizes. Per-receiver failures are recorded.
// Throws NonPositiveGain when integer fading is required but absent.
FullDuplexRound run_full_round(std::span<const PrimeInput> primes, const ChannelState& ch,
                               const PrecisionContext& ctx, Rng& rng,
                               const FullDuplexOptions& options = {});

// S = p_own * radical(exponent_map). Throws RecoveryFailure if the receiver
// failed and DuplicatePrimeDetected if its own prime shows up in the map.
mpz_class recover_secret_full(const PrimeInput& p_own, const FmacObservation& obs);

// Throws DuplicatePrimeDetected when two users hold the same prime: the
// radical would merge them and users would disagree.
ProtocolTranscript run_protocol_fmac(std::span<const PrimeInput> primes, const ChannelState& ch,
                                     const PrecisionContext& ctx, Rng& rng,
                                     const FullDuplexOptions& options = {});

}  // namespace otakey
