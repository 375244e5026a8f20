#include "otakey/channel.hpp"

#include <cmath>

#include "otakey/errors.hpp"

namespace otakey {

namespace {

const BigReal kZero;

// Gains are stored with 17 significant digits, like the doubles they come from.
BigReal gain_from_double(double g) { return BigReal::from_double(g); }

}  // namespace

std::string FadingModel::name() const {
  switch (kind) {
    case FadingKind::kIdeal:
      return "ideal";
    case FadingKind::kRayleigh:
      return "rayleigh";
    case FadingKind::kInteger:
      return "integer";
    case FadingKind::kQuantized:
      return "quantized";
  }
  return "unknown";
}

FadingKind FadingModel::parse_kind(const std::string& name) {
  if (name == "ideal") return FadingKind::kIdeal;
  if (name == "rayleigh") return FadingKind::kRayleigh;
  if (name == "integer") return FadingKind::kInteger;
  if (name == "quantized") return FadingKind::kQuantized;
  throw ParseError("unknown fading model '" + name + "'");
}

ChannelState::ChannelState(std::vector<std::vector<BigReal>> gains, std::vector<BigReal> eve_gains,
                           BigReal h_star, BigReal noise_variance, FadingModel model,
                           std::uint64_t seed)
    : gains_(std::move(gains)),
      eve_gains_(std::move(eve_gains)),
      h_star_(std::move(h_star)),
      noise_variance_(std::move(noise_variance)),
      model_(model),
      seed_(seed) {
  const std::size_t n = eve_gains_.size();
  if (n < 2) throw NonPositiveGain("a channel needs at least two users");
  if (gains_.size() != n) throw NonPositiveGain("gain matrix does not match the user count");
  if (h_star_.sign() <= 0) throw NonPositiveGain("h_star must be positive");
  if (noise_variance_.sign() < 0) throw NonPositiveGain("noise variance must be non-negative");
  for (std::size_t i = 0; i < n; ++i) {
    if (gains_[i].size() != n) throw NonPositiveGain("gain matrix must be square");
    if (eve_gains_[i].sign() <= 0) throw NonPositiveGain("eavesdropper gains must be positive");
    gains_[i][i] = BigReal();
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (gains_[i][j].sign() <= 0) throw NonPositiveGain("link gains must be positive");
      if (gains_[i][j] != gains_[j][i]) {
        throw NonPositiveGain("gains are not reciprocal at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
    }
  }
}

const BigReal& ChannelState::gain(int from, int to) const {
  if (from == to) return kZero;
  return gains_.at(static_cast<std::size_t>(from)).at(static_cast<std::size_t>(to));
}

const BigReal& ChannelState::eve_gain(int from) const {
  return eve_gains_.at(static_cast<std::size_t>(from));
}

std::optional<long> ChannelState::integer_ratio(int from, int to) const {
  const BigReal& h = gain(from, to);
  if (h.is_zero()) return std::nullopt;
  int digits = std::max(h.precision(), h_star_.precision()) + 20;
  mpz_class c = div(h, h_star_, digits).to_nearest_integer();
  if (c <= 0 || !mpz_fits_slong_p(c.get_mpz_t())) return std::nullopt;
  if (BigReal(c) * h_star_ != h) return std::nullopt;
  return c.get_si();
}

bool ChannelState::has_integer_fading() const {
  for (int i = 0; i < n_users(); ++i) {
    for (int j = 0; j < n_users(); ++j) {
      if (i != j && !integer_ratio(i, j)) return false;
    }
  }
  return true;
}

ChannelState draw_channel(int n_users, const FadingModel& model, const BigReal& h_star,
                          const BigReal& noise_variance, Rng& rng) {
  if (n_users < 2) throw NonPositiveGain("need at least two users");
  if ((model.kind == FadingKind::kRayleigh || model.kind == FadingKind::kQuantized) &&
      !(model.scale > 0)) {
    throw NonPositiveGain("rayleigh scale must be positive");
  }
  if (model.kind == FadingKind::kInteger && model.c_max < 1) {
    throw NonPositiveGain("c_max must be at least 1");
  }
  const auto n = static_cast<std::size_t>(n_users);
  std::vector<std::vector<BigReal>> h(n, std::vector<BigReal>(n));
  std::vector<BigReal> eve(n);

  auto legit = [&]() -> BigReal {
    switch (model.kind) {
      case FadingKind::kIdeal:
        return BigReal(1);
      case FadingKind::kRayleigh:
      case FadingKind::kQuantized:
        return gain_from_double(rng.rayleigh(model.scale));
      case FadingKind::kInteger:
        return BigReal(static_cast<long>(rng.uniform_int(1, static_cast<std::uint64_t>(model.c_max)))) *
               h_star;
    }
    return BigReal(1);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      h[i][j] = legit();
      h[j][i] = h[i][j];
    }
  }
  // Eve's taps are drawn after, and independently of, the legitimate links.
  for (std::size_t i = 0; i < n; ++i) {
    switch (model.kind) {
      case FadingKind::kIdeal:
        eve[i] = BigReal(1);
        break;
      case FadingKind::kRayleigh:
      case FadingKind::kQuantized:
        eve[i] = gain_from_double(rng.rayleigh(model.scale));
        break;
      case FadingKind::kInteger:
        eve[i] = gain_from_double(rng.uniform(0.5, model.c_max + 0.5)) * h_star;
        break;
    }
  }
  std::uint64_t seed = rng.next_u64();
  return ChannelState(std::move(h), std::move(eve), h_star, noise_variance, model, seed);
}

namespace {

BigReal noise_sample(const BigReal& variance, Rng& rng) {
  if (variance.sign() <= 0) return BigReal();
  double sigma = std::sqrt(variance.to_double());
  return BigReal::from_double(sigma * rng.normal());
}

}  // namespace

BigReal superpose(std::span<const Transmission> signals, int receiver, bool exclude_self,
                  const ChannelState& ch, Rng& rng, const PrecisionContext& ctx) {
  BigReal y;
  for (const auto& tx : signals) {
    if (tx.sender == receiver) {
      if (exclude_self) continue;
      throw NonPositiveGain("user " + std::to_string(receiver) +
                            " has no gain towards itself; its own term must be excluded");
    }
    y += ch.gain(tx.sender, receiver) * tx.signal;
  }
  y += noise_sample(ch.noise_variance(), rng);
  return y.round(ctx);
}

BigReal eve_observe(std::span<const Transmission> signals, const ChannelState& ch, Rng& rng,
                    const PrecisionContext& ctx, bool with_noise) {
  BigReal y;
  for (const auto& tx : signals) y += ch.eve_gain(tx.sender) * tx.signal;
  // Eve's receiver noise follows the same variance as the users'.
  if (with_noise) y += noise_sample(ch.noise_variance(), rng);
  return y.round(ctx);
}

const BigReal& CsiEstimate::estimate(int from, int to) const {
  return h_hat.at(static_cast<std::size_t>(from)).at(static_cast<std::size_t>(to));
}

CsiEstimate estimate_csi(const ChannelState& ch, const CsiErrorModel& error_model, Rng& rng) {
  if (error_model.epsilon < 0 || !std::isfinite(error_model.epsilon)) {
    throw NonPositiveInput("CSI error epsilon must be a finite value >= 0");
  }
  CsiEstimate est{ch.gains(), error_model};
  if (error_model.kind == CsiErrorModel::Kind::kPerfect || error_model.epsilon == 0) return est;
  const BigReal eps = BigReal::from_double(error_model.epsilon);
  const int n = ch.n_users();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      BigReal u = BigReal::from_double(rng.uniform(-error_model.epsilon, error_model.epsilon));
      if (u > eps) u = eps;
      if (u < -eps) u = -eps;
      est.h_hat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          ch.gain(i, j) * (BigReal(1) + u);
    }
  }
  return est;
}

}  // namespace otakey
