#include "otakey/serialize.hpp"

#include "otakey/errors.hpp"

namespace otakey {

namespace {

Json real(const BigReal& x) { return x.to_string(); }

Json optional_real(const std::optional<BigReal>& x) { return x ? real(*x) : Json(nullptr); }

Json optional_int(const std::optional<mpz_class>& x) { return x ? Json(x->get_str()) : Json(nullptr); }

BigReal read_real(const Json& v, const char* what) {
  if (v.is_string()) return BigReal::parse(v.get<std::string>());
  if (v.is_number_integer()) return BigReal(v.get<long>());
  if (v.is_number()) return BigReal::from_double(v.get<double>());
  throw ParseError(std::string("expected a number for '") + what + "'");
}

Json exponent_map(const Factorization& f) {
  Json out = Json::array();
  for (const auto& pp : f.factors()) out.push_back({{"prime", pp.prime.get_str()}, {"exponent", pp.exponent}});
  return out;
}

}  // namespace

Json fading_to_json(const FadingModel& model) {
  Json j = {{"kind", model.name()}};
  if (model.kind == FadingKind::kRayleigh || model.kind == FadingKind::kQuantized) j["scale"] = model.scale;
  if (model.kind == FadingKind::kInteger) j["c_max"] = model.c_max;
  return j;
}

FadingModel fading_from_json(const Json& doc) {
  if (doc.is_string()) return {FadingModel::parse_kind(doc.get<std::string>()), 1.0, 1};
  if (!doc.is_object()) throw ParseError("fading must be an object or a kind name");
  FadingModel m;
  m.kind = FadingModel::parse_kind(doc.value("kind", std::string("ideal")));
  m.scale = doc.value("scale", 1.0);
  m.c_max = doc.value("c_max", 1);
  return m;
}

Json channel_to_json(const ChannelState& ch) {
  Json h = Json::array();
  for (const auto& row : ch.gains()) {
    Json r = Json::array();
    for (const auto& g : row) r.push_back(real(g));
    h.push_back(std::move(r));
  }
  Json eve = Json::array();
  for (const auto& g : ch.eve_gains()) eve.push_back(real(g));
  return {{"n", ch.n_users()},
          {"model", fading_to_json(ch.model())},
          {"h_star", real(ch.h_star())},
          {"h", std::move(h)},
          {"h_eve", std::move(eve)},
          {"noise_variance", real(ch.noise_variance())},
          {"seed", ch.seed()}};
}

ChannelState channel_from_json(const Json& doc) {
  try {
    const int n = doc.at("n").get<int>();
    std::vector<std::vector<BigReal>> h;
    for (const auto& row : doc.at("h")) {
      std::vector<BigReal> r;
      for (const auto& g : row) r.push_back(read_real(g, "h"));
      h.push_back(std::move(r));
    }
    std::vector<BigReal> eve;
    for (const auto& g : doc.at("h_eve")) eve.push_back(read_real(g, "h_eve"));
    if (static_cast<int>(eve.size()) != n) throw ParseError("h_eve length does not match n");
    return ChannelState(std::move(h), std::move(eve), read_real(doc.at("h_star"), "h_star"),
                        read_real(doc.value("noise_variance", Json("0")), "noise_variance"),
                        fading_from_json(doc.value("model", Json("ideal"))), doc.value("seed", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad channel document: ") + e.what());
  }
}

Json transcript_to_json(const ProtocolTranscript& t) {
  Json rounds = Json::array();
  for (const auto& r : t.rounds) {
    Json signals = Json::array();
    for (const auto& s : r.signals) signals.push_back({{"sender", s.sender}, {"signal", real(s.signal)}});
    Json jr = {{"receiver", r.receiver},
               {"signals", std::move(signals)},
               {"observation", real(r.observation)},
               {"post_value", real(r.post_value)},
               {"recovered", optional_int(r.recovered)},
               {"distance_to_integer", optional_real(r.distance_to_integer)}};
    if (!r.failure.empty()) jr["failure"] = r.failure;
    rounds.push_back(std::move(jr));
  }
  if (t.full_round) {
    for (const auto& o : t.full_round->observations) {
      Json jr = {{"receiver", o.receiver},
                 {"observation", real(o.observation)},
                 {"post_value", real(o.post_value)},
                 {"recovered", optional_int(o.recovered_radical)},
                 {"distance_to_integer", optional_real(o.distance_to_integer)},
                 {"exponent_map", exponent_map(o.exponent_map)}};
      if (!o.failure.empty()) jr["failure"] = o.failure;
      rounds.push_back(std::move(jr));
    }
  }
  Json secrets = Json::array();
  for (const auto& s : t.per_user_secret) secrets.push_back(optional_int(s));
  return {{"protocol", protocol_name(t.protocol)},
          {"rounds_used", t.rounds_used},
          {"rounds", std::move(rounds)},
          {"per_user_secret", std::move(secrets)}};
}

Json eve_report_to_json(const EveReport& r) {
  Json ratios = Json::array();
  for (const auto& x : r.ratios()) ratios.push_back(real(x));
  Json j = {{"mode", eve_mode_name(r.mode)},
            {"target_receiver", r.target_receiver},
            {"psi_eve", real(r.psi_eve)},
            {"psi_legit", real(r.psi_legit)},
            {"ratios", std::move(ratios)},
            {"error_factor", real(r.error_factor)},
            {"abs_discrepancy", real(r.abs_discrepancy)},
            {"digit_overlap", r.digit_overlap},
            {"key_equal", r.key_equal}};
  if (!r.eve_failure.empty()) j["eve_failure"] = r.eve_failure;
  return j;
}

}  // namespace otakey
