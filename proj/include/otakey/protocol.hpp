#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "otakey/bigreal.hpp"
#include "otakey/channel.hpp"
#include "otakey/numerics.hpp"

namespace otakey {

enum class Protocol { kHalfDuplex, kFullDuplex };

std::string protocol_name(Protocol p);  // "hmac" / "fmac"
Protocol parse_protocol(const std::string& name);

// One listening round of the half-duplex scheme. Index j listens while
// every other user transmits ln(p_i) / h_hat_ij.
struct HmacRoundRecord {
  int receiver = 0;
  std::vector<Transmission> signals;  // every user except the receiver
  BigReal observation;
  BigReal post_value;  // exp(observation)
  std::optional<mpz_class> recovered;
  std::optional<BigReal> distance_to_integer;
  std::string failure;

  bool ok() const { return recovered.has_value(); }
  // Throws RoundRecoveryFailure carrying `failure` when recovery failed.
  const mpz_class& recovered_value() const;
};

// One receiver's view of the single full-duplex exchange.
struct FmacObservation {
  int receiver = 0;
  BigReal observation;  // after ideal self-interference cancellation
  BigReal post_value;
  Factorization exponent_map;  // prod p_i^c_ij, own prime absent
  std::optional<mpz_class> recovered_radical;
  std::optional<BigReal> distance_to_integer;
  std::string failure;

  bool ok() const { return recovered_radical.has_value(); }
};

// Everything every user transmits in the full-duplex exchange, plus what each
// one recovered from it.
struct FullDuplexRound {
  std::vector<Transmission> signals;
  std::vector<FmacObservation> observations;
};

struct ProtocolTranscript {
  Protocol protocol = Protocol::kHalfDuplex;
  std::vector<HmacRoundRecord> rounds;       // half duplex
  std::optional<FullDuplexRound> full_round;  // full duplex
  std::vector<std::optional<mpz_class>> per_user_secret;
  std::vector<std::string> failures;  // per user, empty when recovered
  int rounds_used = 0;

  int failure_count() const;
  // Largest distance_to_integer over successful recoveries.
  std::optional<BigReal> max_distance_to_integer() const;
};

// Exact product of the inputs; the value every user should agree on.
mpz_class product_of(std::span<const PrimeInput> primes);

// Throws DuplicatePrimeDetected naming the repeated value.
void require_distinct(std::span<const PrimeInput> primes);

}  // namespace otakey
