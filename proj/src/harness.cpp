#include "otakey/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "otakey/errors.hpp"
#include "otakey/fmac.hpp"
#include "otakey/hmac.hpp"
#include "otakey/keyderive.hpp"

namespace otakey {

namespace fs = std::filesystem;

namespace {

template <typename T>
T field_as(const Json& doc, const std::string& key) {
  try {
    return doc.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key, "wrong type: " + doc.dump());
  }
}

BigReal real_field(const Json& v, const std::string& key) {
  try {
    if (v.is_string()) return BigReal::parse(v.get<std::string>());
    if (v.is_number_integer()) return BigReal(v.get<long>());
    if (v.is_number()) return BigReal::from_double(v.get<double>());
  } catch (const ParseError& e) {
    throw ConfigError(key, e.what());
  }
  throw ConfigError(key, "expected a number or a decimal string");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

EveReport attack(const ExperimentConfig& cfg, const ProtocolTranscript& t, std::span<const PrimeInput> primes,
                 const ChannelState& ch, const CsiEstimate& csi, const PrecisionContext& ctx) {
  try {
    switch (cfg.eve_mode()) {
      case EveMode::kSingleRound:
        return eve_attack_half(t.rounds[0], primes, ch, csi, ctx);
      case EveMode::kTwoRound:
        return eve_attack_two_round(t.rounds[0], t.rounds[1], primes, ch, csi, ctx);
      case EveMode::kFullDuplex:
        return eve_attack_full(*t.full_round, primes, ch, ctx, 0);
    }
  } catch (const Error& e) {
    EveReport failed;
    failed.mode = cfg.eve_mode();
    failed.eve_failure = e.what();
    return failed;
  }
  return {};
}

}  // namespace

EveMode ExperimentConfig::eve_mode() const {
  if (eve.mode) return *eve.mode;
  return protocol == Protocol::kHalfDuplex ? EveMode::kSingleRound : EveMode::kFullDuplex;
}

void ExperimentConfig::validate() const {
  if (n_users < 2 || n_users > 64) throw ConfigError("n_users", "must be in [2, 64]");
  if (prime_digits < 1 || prime_digits > 40) throw ConfigError("prime_digits", "must be in [1, 40]");
  if (precision_digits < PrecisionContext::kMinDigits || precision_digits > 4096) {
    throw ConfigError("precision_digits", "must be in [16, 4096]");
  }
  if ((fading.kind == FadingKind::kRayleigh || fading.kind == FadingKind::kQuantized) &&
      !(std::isfinite(fading.scale) && fading.scale > 0)) {
    throw ConfigError("fading.scale", "must be positive");
  }
  if (fading.kind == FadingKind::kInteger && (fading.c_max < 1 || fading.c_max > 64)) {
    throw ConfigError("fading.c_max", "must be in [1, 64]");
  }
  if (protocol == Protocol::kFullDuplex && fading.kind != FadingKind::kInteger &&
      fading.kind != FadingKind::kQuantized) {
    throw ConfigError("fading", "fmac needs integer (or the quantized extension) fading");
  }
  if (h_star.sign() <= 0) throw ConfigError("h_star", "must be positive");
  if (!(csi_error >= 0 && csi_error <= 0.5)) throw ConfigError("csi_error", "must be in [0, 0.5]");
  if (noise_variance.sign() < 0) throw ConfigError("noise_variance", "must be non-negative");
  if (trials < 1 || trials > 10'000'000) throw ConfigError("trials", "must be in [1, 10000000]");
  if (out.empty()) throw ConfigError("out", "must not be empty");
  if (eve.enabled) {
    EveMode m = eve_mode();
    bool half = protocol == Protocol::kHalfDuplex;
    if (half == (m == EveMode::kFullDuplex)) {
      throw ConfigError("eve.mode", "'" + eve_mode_name(m) + "' does not apply to " + protocol_name(protocol));
    }
  }
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json eve = {{"enabled", cfg.eve.enabled}};
  eve["mode"] = cfg.eve.mode ? Json(eve_mode_name(*cfg.eve.mode)) : Json(nullptr);
  return {{"protocol", protocol_name(cfg.protocol)},
          {"n_users", cfg.n_users},
          {"prime_digits", cfg.prime_digits},
          {"precision_digits", cfg.precision_digits},
          {"fading", fading_to_json(cfg.fading)},
          {"h_star", cfg.h_star.to_string()},
          {"csi_error", cfg.csi_error},
          {"noise_variance", cfg.noise_variance.to_string()},
          {"eve", std::move(eve)},
          {"trials", cfg.trials},
          {"seed", cfg.seed},
          {"out", cfg.out},
          {"save_transcripts", cfg.save_transcripts}};
}

ExperimentConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  ExperimentConfig cfg;
  for (const auto& [key, v] : doc.items()) {
    if (key == "protocol") {
      try {
        cfg.protocol = parse_protocol(field_as<std::string>(v, key));
      } catch (const ParseError& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "n_users") {
      cfg.n_users = field_as<int>(v, key);
    } else if (key == "prime_digits") {
      cfg.prime_digits = field_as<int>(v, key);
    } else if (key == "precision_digits") {
      cfg.precision_digits = field_as<int>(v, key);
    } else if (key == "fading") {
      try {
        cfg.fading = fading_from_json(v);
      } catch (const Error& e) {
        throw ConfigError(key, e.what());
      } catch (const nlohmann::json::exception&) {
        throw ConfigError(key, "wrong type: " + v.dump());
      }
    } else if (key == "h_star") {
      cfg.h_star = real_field(v, key);
    } else if (key == "csi_error") {
      cfg.csi_error = field_as<double>(v, key);
    } else if (key == "noise_variance") {
      cfg.noise_variance = real_field(v, key);
    } else if (key == "eve") {
      if (v.is_boolean()) {
        cfg.eve.enabled = v.get<bool>();
        continue;
      }
      if (!v.is_object()) throw ConfigError(key, "expected an object or a boolean");
      for (const auto& [k, e] : v.items()) {
        if (k == "enabled") {
          cfg.eve.enabled = field_as<bool>(e, "eve.enabled");
        } else if (k == "mode") {
          if (e.is_null()) {
            cfg.eve.mode.reset();
            continue;
          }
          try {
            cfg.eve.mode = parse_eve_mode(field_as<std::string>(e, "eve.mode"));
          } catch (const ParseError& err) {
            throw ConfigError("eve.mode", err.what());
          }
        } else {
          throw ConfigError("eve." + k, "unknown field");
        }
      }
    } else if (key == "trials") {
      cfg.trials = field_as<int>(v, key);
    } else if (key == "seed") {
      cfg.seed = field_as<std::uint64_t>(v, key);
    } else if (key == "out") {
      cfg.out = field_as<std::string>(v, key);
    } else if (key == "save_transcripts") {
      cfg.save_transcripts = field_as<bool>(v, key);
    } else {
      throw ConfigError(key, "unknown field");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot read " + path.string());
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

TrialResult run_trial(const ExperimentConfig& cfg, int trial_id, bool keep_transcript) {
  const std::uint64_t seed = child_seed(cfg.seed, static_cast<std::uint64_t>(trial_id));
  Rng rng(seed);
  const PrecisionContext ctx(cfg.precision_digits);
  TrialResult result;
  auto primes = sample_distinct_primes(cfg.n_users, cfg.prime_digits, rng, &result.prime_collisions);
  ChannelState ch = draw_channel(cfg.n_users, cfg.fading, cfg.h_star, cfg.noise_variance, rng);
  CsiErrorModel csi_model = cfg.csi_error > 0 ? CsiErrorModel::relative(cfg.csi_error) : CsiErrorModel::perfect();
  CsiEstimate csi = estimate_csi(ch, csi_model, rng);

  ProtocolTranscript t;
  if (cfg.protocol == Protocol::kHalfDuplex) {
    t = run_protocol_hmac(primes, ch, csi, ctx, rng);
  } else {
    FullDuplexOptions options;
    options.require_integer_fading = cfg.fading.kind == FadingKind::kInteger;
    t = run_protocol_fmac(primes, ch, ctx, rng, options);
  }

  MetricsRow& row = result.row;
  row.trial_id = trial_id;
  row.rounds_used = t.rounds_used;
  row.group_agreed = group_agreement(t.per_user_secret).agreed;
  row.user_failures = t.failure_count();
  row.max_distance_to_integer = t.max_distance_to_integer();
  if (cfg.eve.enabled) {
    result.eve = attack(cfg, t, primes, ch, csi, ctx);
    row.eve_key_equal = result.eve->key_equal;
    row.eve_digit_overlap = result.eve->digit_overlap;
  }

  if (keep_transcript) {
    Json ps = Json::array();
    for (const auto& p : primes) ps.push_back(p.value().get_str());
    result.transcript = {{"trial_id", trial_id},
                         {"seed", seed},
                         {"primes", std::move(ps)},
                         {"secret", product_of(primes).get_str()},
                         {"channel", channel_to_json(ch)},
                         {"transcript", transcript_to_json(t)}};
    if (result.eve) result.transcript["eve"] = eve_report_to_json(*result.eve);
  }
  return result;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << "trial_id,rounds_used,group_agreed,user_failures,eve_key_equal,eve_digit_overlap,max_distance_to_integer\n";
  for (const auto& r : rows) {
    out << r.trial_id << ',' << r.rounds_used << ',' << (r.group_agreed ? 1 : 0) << ',' << r.user_failures << ',';
    if (r.eve_key_equal) out << (*r.eve_key_equal ? 1 : 0);
    out << ',';
    if (r.eve_digit_overlap) out << *r.eve_digit_overlap;
    out << ',';
    if (r.max_distance_to_integer) out << r.max_distance_to_integer->to_string(6);
    out << '\n';
  }
  return out.str();
}

Json summary_to_json(const ExperimentConfig& cfg, const ExperimentSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json j = {{"schema_version", kSummarySchemaVersion},
            {"protocol", protocol_name(cfg.protocol)},
            {"n_users", cfg.n_users},
            {"trials", s.trials},
            {"agreement_rate", s.agreement_rate},
            {"eve_success_rate", opt(s.eve_success_rate)},
            {"mean_digit_overlap", opt(s.mean_digit_overlap)},
            {"mean_rounds_used", s.mean_rounds_used},
            {"user_failure_rate", s.user_failure_rate},
            {"prime_collisions", s.prime_collisions},
            {"max_distance_to_integer",
             s.max_distance_to_integer ? Json(s.max_distance_to_integer->to_string(6)) : Json(nullptr)}};
  if (s.digit_security) {
    const auto& d = *s.digit_security;
    auto histogram = [](const std::map<int, int>& h) {
      Json o = Json::object();
      for (auto [k, v] : h) o[std::to_string(k)] = v;
      return o;
    };
    j["digit_security"] = {{"overlap_histogram", histogram(d.overlap_histogram)},
                           {"factor_overlap_histogram", histogram(d.factor_overlap_histogram)},
                           {"eligible_factors", d.eligible_factors},
                           {"trailing_digit_violations", d.trailing_digit_violations}};
  }
  // The output location is not part of the experiment; leaving it out keeps
  // summaries from different directories byte-comparable.
  Json echo = config_to_json(cfg);
  echo.erase("out");
  j["config"] = std::move(echo);
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const fs::path out_dir(cfg.out);
  const bool transcripts = options.write_files && cfg.save_transcripts;
  if (options.write_files) make_dirs(out_dir);
  if (transcripts) make_dirs(out_dir / "transcripts");

  const int n = cfg.trials;
  int workers = options.workers > 0 ? options.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n);

  std::vector<std::optional<TrialResult>> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < n; k = next++) {
      auto slot = static_cast<std::size_t>(k);
      try {
        TrialResult r = run_trial(cfg, k, transcripts);
        if (transcripts) {
          write_file(out_dir / "transcripts" / ("trial_" + std::to_string(k) + ".json"), r.transcript.dump(2) + "\n");
          r.transcript = Json();
        }
        results[slot] = std::move(r);
      } catch (...) {
        errors[slot] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult out;
  ExperimentSummary& s = out.summary;
  s.trials = n;
  int agreed = 0, eve_wins = 0, failures = 0;
  long rounds = 0, overlap = 0;
  std::vector<EveReport> reports;
  for (auto& r : results) {
    const MetricsRow& row = r->row;
    agreed += row.group_agreed;
    rounds += row.rounds_used;
    failures += row.user_failures;
    s.prime_collisions += r->prime_collisions;
    if (row.max_distance_to_integer &&
        (!s.max_distance_to_integer || *row.max_distance_to_integer > *s.max_distance_to_integer)) {
      s.max_distance_to_integer = row.max_distance_to_integer;
    }
    if (r->eve) {
      eve_wins += r->eve->key_equal;
      overlap += r->eve->digit_overlap;
      reports.push_back(std::move(*r->eve));
    }
    out.rows.push_back(row);
  }
  s.agreement_rate = static_cast<double>(agreed) / n;
  s.mean_rounds_used = static_cast<double>(rounds) / n;
  s.user_failure_rate = static_cast<double>(failures) / (static_cast<double>(n) * cfg.n_users);
  if (cfg.eve.enabled) {
    s.eve_success_rate = static_cast<double>(eve_wins) / n;
    s.mean_digit_overlap = static_cast<double>(overlap) / n;
    s.digit_security = digit_security_report(reports, cfg.prime_digits, 1.0001);
  }

  if (options.write_files) {
    write_file(out_dir / "metrics.csv", metrics_csv(out.rows));
    write_file(out_dir / "summary.json", summary_to_json(cfg, s).dump(2) + "\n");
  }
  return out;
}

ExperimentConfig with_field(const ExperimentConfig& cfg, const std::string& axis, const std::string& value) {
  ExperimentConfig c = cfg;
  auto as_int = [&] {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw ConfigError(axis, "expected an integer, got '" + value + "'");
    return v;
  };
  auto as_real = [&] {
    try {
      return BigReal::parse(value);
    } catch (const ParseError&) {
      throw ConfigError(axis, "expected a number, got '" + value + "'");
    }
  };
  if (axis == "n_users") {
    c.n_users = as_int();
  } else if (axis == "prime_digits") {
    c.prime_digits = as_int();
  } else if (axis == "precision_digits") {
    c.precision_digits = as_int();
  } else if (axis == "trials") {
    c.trials = as_int();
  } else if (axis == "c_max") {
    c.fading.c_max = as_int();
  } else if (axis == "csi_error") {
    c.csi_error = as_real().to_double();
  } else if (axis == "fading_scale") {
    c.fading.scale = as_real().to_double();
  } else if (axis == "noise_variance") {
    c.noise_variance = as_real();
  } else if (axis == "h_star") {
    c.h_star = as_real();
  } else {
    throw ConfigError("axis", "'" + axis + "' is not a sweepable field");
  }
  return c;
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::string& axis,
                            const std::vector<std::string>& values, const RunOptions& options) {
  if (values.empty()) throw ConfigError("values", "at least one value is required");
  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    ExperimentConfig c = with_field(cfg, axis, v);
    c.out = (fs::path(cfg.out) / (axis + "_" + v)).string();
    c.validate();
    configs.push_back(std::move(c));
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    rows.push_back({values[i], run_experiment(configs[i], options).summary});
  }
  if (options.write_files) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::ostringstream csv;
    csv << axis << ",agreement_rate,eve_success_rate,mean_digit_overlap,mean_rounds_used,user_failure_rate\n";
    Json doc = {{"schema_version", kSummarySchemaVersion}, {"axis", axis}, {"rows", Json::array()}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& s = rows[i].summary;
      csv << rows[i].value << ',' << format_double(s.agreement_rate) << ',' << opt(s.eve_success_rate) << ','
          << opt(s.mean_digit_overlap) << ',' << format_double(s.mean_rounds_used) << ','
          << format_double(s.user_failure_rate) << '\n';
      Json entry = summary_to_json(configs[i], s);
      entry["value"] = rows[i].value;
      doc["rows"].push_back(std::move(entry));
    }
    write_file(fs::path(cfg.out) / "sweep.csv", csv.str());
    write_file(fs::path(cfg.out) / "sweep.json", doc.dump(2) + "\n");
  }
  return rows;
}

}  // namespace otakey
