#include "otakey/protocol.hpp"

#include <algorithm>

#include "otakey/errors.hpp"

namespace otakey {

std::string protocol_name(Protocol p) { return p == Protocol::kHalfDuplex ? "hmac" : "fmac"; }

Protocol parse_protocol(const std::string& name) {
  if (name == "hmac") return Protocol::kHalfDuplex;
  if (name == "fmac") return Protocol::kFullDuplex;
  throw ParseError("unknown protocol '" + name + "' (expected hmac or fmac)");
}

const mpz_class& HmacRoundRecord::recovered_value() const {
  if (!recovered) {
    throw RoundRecoveryFailure("round with receiver " + std::to_string(receiver) +
                               " failed: " + failure);
  }
  return *recovered;
}

int ProtocolTranscript::failure_count() const {
  return static_cast<int>(
      std::count_if(per_user_secret.begin(), per_user_secret.end(), [](const auto& s) { return !s; }));
}

std::optional<BigReal> ProtocolTranscript::max_distance_to_integer() const {
  std::optional<BigReal> worst;
  auto visit = [&](const std::optional<BigReal>& d) {
    if (d && (!worst || *d > *worst)) worst = *d;
  };
  for (const auto& r : rounds) visit(r.distance_to_integer);
  if (full_round) {
    for (const auto& o : full_round->observations) visit(o.distance_to_integer);
  }
  return worst;
}

mpz_class product_of(std::span<const PrimeInput> primes) {
  mpz_class s = 1;
  for (const auto& p : primes) s *= p.value();
  return s;
}

void require_distinct(std::span<const PrimeInput> primes) {
  for (std::size_t i = 0; i < primes.size(); ++i) {
    for (std::size_t j = i + 1; j < primes.size(); ++j) {
      if (primes[i] == primes[j]) {
        throw DuplicatePrimeDetected("users " + std::to_string(i) + " and " + std::to_string(j) +
                                     " both chose " + primes[i].value().get_str());
      }
    }
  }
}

}  // namespace otakey
