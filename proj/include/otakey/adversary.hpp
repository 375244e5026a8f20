#pragma once

// Passive eavesdropper: noiseless, knows the protocol, the post-processing
// and h_star, but not the fading realizations of the legitimate links.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "otakey/fmac.hpp"
#include "otakey/hmac.hpp"

namespace otakey {

enum class EveMode { kSingleRound, kTwoRound, kFullDuplex };

std::string eve_mode_name(EveMode mode);  // "single", "two_round", "full"
EveMode parse_eve_mode(const std::string& name);

// How one user's prime enters the legitimate and the intercepted value:
// p^legit_exponent versus p^eve_exponent.
struct ExponentTerm {
  int user = 0;
  BigReal eve_exponent;    // r_i
  BigReal legit_exponent;  // 1 (half duplex, perfect CSI), c_ij (full duplex), 0 for the receiver itself
  int digit_overlap = 0;   // leading digits shared by p^legit and p^eve; -1 when legit is 0
};

struct EveReport {
  EveMode mode = EveMode::kSingleRound;
  int target_receiver = 0;
  BigReal psi_eve;
  BigReal psi_legit;
  std::vector<ExponentTerm> terms;
  BigReal error_factor;  // E_r
  BigReal abs_discrepancy;
  int digit_overlap = 0;
  // Eve's complete decision procedure produced S.
  bool key_equal = false;
  // Eve's rounded value matched the integer the receiver recovered.
  bool observation_recovered = false;
  // Full duplex only: every h_iE / h_star is an exact integer.
  bool integer_channel = false;
  std::string eve_failure;

  std::vector<BigReal> ratios() const;
};

// E_r = 1 - prod p_i^(eve_i - legit_i).
BigReal error_factor(std::span<const PrimeInput> primes, std::span<const BigReal> eve_exponents,
                     std::span<const BigReal> legit_exponents, const PrecisionContext& ctx);

// Half-duplex form, every legitimate exponent 1: E_r = 1 - prod p_i^(r_i - 1).
BigReal error_factor(std::span<const PrimeInput> primes, std::span<const BigReal> ratios,
                     const PrecisionContext& ctx);

// Eve intercepts one listening round. She lacks the listener's prime, so
// key_equal is always false; observation_recovered records whether she at
// least reproduced the listener's integer.
EveReport eve_attack_half(const HmacRoundRecord& round, std::span<const PrimeInput> primes,
                          const ChannelState& ch, const CsiEstimate& csi, const PrecisionContext& ctx);

// Eve intercepts two listening rounds (receivers a != b). If both values
// round to integers A and B she outputs lcm(A, B), which is S when both are
// exact. Report fields describe the first round.
EveReport eve_attack_two_round(const HmacRoundRecord& first, const HmacRoundRecord& second,
                               std::span<const PrimeInput> primes, const ChannelState& ch,
                               const CsiEstimate& csi, const PrecisionContext& ctx);

// Eve intercepts the full-duplex exchange, all N terms included, and runs
// round -> factorize -> radical. Compared against `target`'s observation.
EveReport eve_attack_full(const FullDuplexRound& round, std::span<const PrimeInput> primes,
                          const ChannelState& ch, const PrecisionContext& ctx, int target = 0,
                          const FactorOptions& factor = {});

// Position of the first nonzero fractional digit of s (s = 1.000173 -> 4);
// 0 when s has no fractional part.
int first_nonzero_decimal(const BigReal& s);

struct DigitShiftCheck {
  int position = 0;  // r
  int overlap = 0;   // leading_digit_overlap(n, n * s)
  int digits = 0;    // digits of n
  bool lower_bound_holds() const { return overlap >= position - 1; }
  bool within_slack() const { return overlap <= position + 1; }
};

DigitShiftCheck check_digit_shift(const mpz_class& n, const BigReal& s);

struct DigitSecuritySummary {
  int reports = 0;
  std::map<int, int> overlap_histogram;         // whole-value overlaps
  std::map<int, int> factor_overlap_histogram;  // per-prime overlaps
  int eligible_factors = 0;  // terms with |eve / legit| beyond the ratio bound
  int trailing_digit_violations = 0;  // eligible terms keeping more than prime_digits - 2 digits
  int key_equal_count = 0;

  bool trailing_digits_change() const { return trailing_digit_violations == 0; }
};

// Checks the claim that a ratio beyond `r_bound` changes at least the last
// two digits of every affected prime, and tabulates digit overlaps.
DigitSecuritySummary digit_security_report(std::span<const EveReport> reports, int prime_digits,
                                           double r_bound);

}  // namespace otakey
