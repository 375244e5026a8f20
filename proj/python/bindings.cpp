#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "otakey/errors.hpp"
#include "otakey/fmac.hpp"
#include "otakey/harness.hpp"
#include "otakey/hmac.hpp"
#include "otakey/keyderive.hpp"

namespace py = pybind11;
using namespace otakey;

namespace {

// Python ints cross the boundary as decimal strings.
mpz_class to_mpz(const py::int_& v) { return mpz_class(py::str(v).cast<std::string>()); }
py::int_ to_py(const mpz_class& v) { return py::int_(py::str(v.get_str())); }

std::vector<PrimeInput> to_primes(const std::vector<py::int_>& values) {
  std::vector<PrimeInput> out;
  for (const auto& v : values) out.push_back(PrimeInput::from_value(to_mpz(v)));
  return out;
}

py::list secrets_of(const ProtocolTranscript& t) {
  py::list out;
  for (const auto& s : t.per_user_secret) out.append(s ? py::object(to_py(*s)) : py::none());
  return out;
}

}  // namespace

PYBIND11_MODULE(_otakey, m) {
  m.doc() = "Over-the-air group secret key generation";

  // Translators run in reverse registration order: the base class goes first.
  py::register_exception<Error>(m, "OtakeyError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("is_probable_prime", [](const py::int_& n) { return is_probable_prime(to_mpz(n)); });

  m.def("factorize", [](const py::int_& n) {
    std::vector<std::pair<py::int_, unsigned>> out;
    Factorization found = factorize(to_mpz(n));
    for (const auto& f : found.factors()) out.emplace_back(to_py(f.prime), f.exponent);
    return out;
  });

  m.def(
      "ln", [](const std::string& x, int digits) { return ln(BigReal::parse(x), PrecisionContext(digits)).to_string(); },
      py::arg("x"), py::arg("digits") = 50, "Natural log of a decimal string, as a decimal string.");
  m.def(
      "exp", [](const std::string& x, int digits) { return exp(BigReal::parse(x), PrecisionContext(digits)).to_string(); },
      py::arg("x"), py::arg("digits") = 50);

  m.def(
      "derive_key",
      [](const py::int_& s, int length_bits, const std::string& label) {
        return derive_key(to_mpz(s), length_bits, label).hex();
      },
      py::arg("secret"), py::arg("length_bits") = 256, py::arg("label") = "otakey",
      "HKDF-SHA256 key material from the shared secret, lowercase hex.");

  m.def(
      "run_hmac",
      [](const std::vector<py::int_>& primes, std::uint64_t seed, int digits, double csi_error) {
        auto ps = to_primes(primes);
        Rng rng(seed);
        PrecisionContext ctx(digits);
        ChannelState ch = draw_channel(static_cast<int>(ps.size()), FadingModel::rayleigh(1.0), BigReal(1), BigReal(), rng);
        auto model = csi_error > 0 ? CsiErrorModel::relative(csi_error) : CsiErrorModel::perfect();
        ProtocolTranscript t;
        {
          py::gil_scoped_release release;
          t = run_protocol_hmac(ps, ch, estimate_csi(ch, model, rng), ctx, rng);
        }
        return py::make_tuple(secrets_of(t), t.rounds_used);
      },
      py::arg("primes"), py::arg("seed") = 1, py::arg("digits") = 128, py::arg("csi_error") = 0.0,
      "Half-duplex run over a Rayleigh channel; returns (per-user secrets, rounds_used).");

  m.def(
      "run_fmac",
      [](const std::vector<py::int_>& primes, std::uint64_t seed, int digits, int c_max, const std::string& h_star) {
        auto ps = to_primes(primes);
        Rng rng(seed);
        PrecisionContext ctx(digits);
        ChannelState ch =
            draw_channel(static_cast<int>(ps.size()), FadingModel::integer(c_max), BigReal::parse(h_star), BigReal(), rng);
        ProtocolTranscript t;
        {
          py::gil_scoped_release release;
          t = run_protocol_fmac(ps, ch, ctx, rng);
        }
        return py::make_tuple(secrets_of(t), t.rounds_used);
      },
      py::arg("primes"), py::arg("seed") = 1, py::arg("digits") = 256, py::arg("c_max") = 4, py::arg("h_star") = "0.5",
      "Full-duplex run over an integer-fading channel; returns (per-user secrets, rounds_used).");

  m.def(
      "run_experiment_json",
      [](const std::string& config, int workers, bool write_files) {
        ExperimentConfig cfg = config_from_json(Json::parse(config));
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(cfg, {workers, write_files});
        }
        return py::make_tuple(summary_to_json(cfg, r.summary).dump(), metrics_csv(r.rows));
      },
      py::arg("config"), py::arg("workers") = 0, py::arg("write_files") = false);

  m.def(
      "run_trial_json",
      [](const std::string& config, int trial_id) {
        ExperimentConfig cfg = config_from_json(Json::parse(config));
        cfg.validate();
        return run_trial(cfg, trial_id, true).transcript.dump();
      },
      py::arg("config"), py::arg("trial_id"));
}
