#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otakey/bigreal.hpp"
#include "otakey/rng.hpp"

namespace otakey {

enum class FadingKind { kIdeal, kRayleigh, kInteger, kQuantized };

// How link gains are drawn.
//
//  ideal      every gain is 1.
//  rayleigh   Rayleigh magnitudes with the given scale.
//  integer    h_ij = c_ij * h_star with c_ij uniform in {1..c_max}, built
//             exactly in decimal. Eve's taps are continuous:
//             u * h_star with u uniform on [0.5, c_max + 0.5).
//  quantized  legitimate gains are Rayleigh; c_ij = round(h_ij / h_star) is
//             what users assume. Integer fading does not hold, so the
//             full-duplex scheme is expected to fail (extension experiment).
struct FadingModel {
  FadingKind kind = FadingKind::kIdeal;
  double scale = 1.0;
  int c_max = 1;

  static FadingModel ideal() { return {}; }
  static FadingModel rayleigh(double scale) { return {FadingKind::kRayleigh, scale, 1}; }
  static FadingModel integer(int c_max) { return {FadingKind::kInteger, 1.0, c_max}; }
  static FadingModel quantized(double scale) { return {FadingKind::kQuantized, scale, 1}; }

  std::string name() const;
  static FadingKind parse_kind(const std::string& name);

  friend bool operator==(const FadingModel&, const FadingModel&) = default;
};

// Link gains for one protocol execution (block fading). Users are indexed
// from 0. Immutable once drawn.
class ChannelState {
 public:
  // Validates shape, positivity and reciprocity; throws NonPositiveGain.
  ChannelState(std::vector<std::vector<BigReal>> gains, std::vector<BigReal> eve_gains,
               BigReal h_star, BigReal noise_variance, FadingModel model = {},
               std::uint64_t seed = 0);

  int n_users() const { return static_cast<int>(eve_gains_.size()); }
  // h[from][to]; the diagonal is unused and reads as zero.
  const BigReal& gain(int from, int to) const;
  const BigReal& eve_gain(int from) const;
  const std::vector<std::vector<BigReal>>& gains() const { return gains_; }
  const std::vector<BigReal>& eve_gains() const { return eve_gains_; }
  const BigReal& h_star() const { return h_star_; }
  const BigReal& noise_variance() const { return noise_variance_; }
  const FadingModel& model() const { return model_; }
  std::uint64_t seed() const { return seed_; }

  // c_ij = h_ij / h_star when that ratio is an exact positive integer.
  std::optional<long> integer_ratio(int from, int to) const;
  bool has_integer_fading() const;

 private:
  std::vector<std::vector<BigReal>> gains_;
  std::vector<BigReal> eve_gains_;
  BigReal h_star_;
  BigReal noise_variance_;
  FadingModel model_;
  std::uint64_t seed_;
};

ChannelState draw_channel(int n_users, const FadingModel& model, const BigReal& h_star,
                          const BigReal& noise_variance, Rng& rng);

// One user's transmitted (pre-processed) signal.
struct Transmission {
  int sender = 0;
  BigReal signal;
};

// y = sum h[sender][receiver] * signal + noise. With exclude_self the
// receiver's own transmission is dropped (silent half-duplex listener, or
// ideal self-interference cancellation). Noise is N(0, noise_variance) and is
// only drawn when the variance is positive.
BigReal superpose(std::span<const Transmission> signals, int receiver, bool exclude_self,
                  const ChannelState& ch, Rng& rng, const PrecisionContext& ctx);

// What a passive eavesdropper receives: every transmission, through her own
// taps, with no self-interference cancellation. `with_noise = false` gives
// the noiseless worst case used by the secrecy analysis.
BigReal eve_observe(std::span<const Transmission> signals, const ChannelState& ch, Rng& rng,
                    const PrecisionContext& ctx, bool with_noise = true);

struct CsiErrorModel {
  enum class Kind { kPerfect, kRelative };
  Kind kind = Kind::kPerfect;
  double epsilon = 0.0;

  static CsiErrorModel perfect() { return {}; }
  static CsiErrorModel relative(double epsilon) { return {Kind::kRelative, epsilon}; }
};

// Gain estimates; h_hat[from][to] is what transmitter `from` believes about
// its link towards `to`.
struct CsiEstimate {
  std::vector<std::vector<BigReal>> h_hat;
  CsiErrorModel error_model;

  const BigReal& estimate(int from, int to) const;
};

// relative(eps): h_hat = h * (1 + u), u uniform in [-eps, eps], exact
// decimal so |h_hat - h| / h <= eps holds without rounding slack.
CsiEstimate estimate_csi(const ChannelState& ch, const CsiErrorModel& error_model, Rng& rng);

}  // namespace otakey
