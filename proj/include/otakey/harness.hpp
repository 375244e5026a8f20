#pragma once

// Seeded Monte-Carlo experiment runner.
//
// metrics.csv columns, one row per trial in trial order:
//   trial_id, rounds_used, group_agreed (0/1), user_failures,
//   eve_key_equal (0/1, empty without Eve), eve_digit_overlap (empty without
//   Eve), max_distance_to_integer (empty when no user recovered)

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "otakey/adversary.hpp"
#include "otakey/serialize.hpp"

namespace otakey {

struct EveConfig {
  bool enabled = false;
  // Defaults to "single" for hmac and "full" for fmac.
  std::optional<EveMode> mode;
};

struct ExperimentConfig {
  Protocol protocol = Protocol::kHalfDuplex;
  int n_users = 4;
  int prime_digits = 6;
  int precision_digits = 128;
  FadingModel fading = FadingModel::rayleigh(1.0);
  BigReal h_star = BigReal(1);
  double csi_error = 0.0;
  BigReal noise_variance;
  EveConfig eve;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string out = "out";
  bool save_transcripts = false;

  EveMode eve_mode() const;
  // Throws ConfigError naming the first offending field.
  void validate() const;
};

Json config_to_json(const ExperimentConfig& cfg);
// Missing fields keep their defaults. Throws ConfigError on unknown fields or
// wrong types.
ExperimentConfig config_from_json(const Json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct MetricsRow {
  int trial_id = 0;
  int rounds_used = 0;
  bool group_agreed = false;
  int user_failures = 0;
  std::optional<bool> eve_key_equal;
  std::optional<int> eve_digit_overlap;
  std::optional<BigReal> max_distance_to_integer;
};

struct TrialResult {
  MetricsRow row;
  int prime_collisions = 0;
  std::optional<EveReport> eve;
  Json transcript;  // filled only when transcripts are requested
};

// One execution, seeded with child_seed(cfg.seed, trial_id). Pure function of
// its arguments.
TrialResult run_trial(const ExperimentConfig& cfg, int trial_id, bool keep_transcript = false);

struct ExperimentSummary {
  int trials = 0;
  double agreement_rate = 0.0;
  std::optional<double> eve_success_rate;
  std::optional<double> mean_digit_overlap;
  double mean_rounds_used = 0.0;
  double user_failure_rate = 0.0;
  int prime_collisions = 0;
  std::optional<BigReal> max_distance_to_integer;
  std::optional<DigitSecuritySummary> digit_security;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  ExperimentSummary summary;
};

struct RunOptions {
  int workers = 0;  // 0: one per hardware thread
  bool write_files = true;
};

inline constexpr int kSummarySchemaVersion = 1;

// Runs every trial on a worker pool, collects rows in trial order and writes
// metrics.csv, summary.json and optional transcripts/trial_<k>.json under
// cfg.out. Output bytes depend only on cfg. Throws IoError when cfg.out is
// not writable.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

std::string metrics_csv(const std::vector<MetricsRow>& rows);
Json summary_to_json(const ExperimentConfig& cfg, const ExperimentSummary& s);

// Fields accepted by sweep(): n_users, prime_digits, precision_digits,
// trials, csi_error, noise_variance, h_star, fading_scale, c_max.
ExperimentConfig with_field(const ExperimentConfig& cfg, const std::string& axis, const std::string& value);

struct SweepRow {
  std::string value;
  ExperimentSummary summary;
};

// One experiment per value, each written to <out>/<axis>_<value>/, plus
// <out>/sweep.csv and <out>/sweep.json.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::string& axis,
                            const std::vector<std::string>& values, const RunOptions& options = {});

}  // namespace otakey
