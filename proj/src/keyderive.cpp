#include "otakey/keyderive.hpp"

#include <map>
#include <memory>

#include <openssl/core_names.h>
#include <openssl/kdf.h>
#include <openssl/params.h>

#include "otakey/errors.hpp"

namespace otakey {

namespace {

constexpr std::string_view kSalt = "otakey group secret v1";

struct KdfDeleter {
  void operator()(EVP_KDF* k) const { EVP_KDF_free(k); }
  void operator()(EVP_KDF_CTX* c) const { EVP_KDF_CTX_free(c); }
};

}  // namespace

std::string DerivedKey::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bits.size() * 2);
  for (unsigned char b : bits) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::vector<unsigned char> to_big_endian(const mpz_class& s) {
  std::size_t count = (mpz_sizeinbase(s.get_mpz_t(), 2) + 7) / 8;
  std::vector<unsigned char> out(count);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, s.get_mpz_t());
  out.resize(written);
  return out;
}

DerivedKey derive_key(const mpz_class& s, int length_bits, std::string_view label) {
  if (s < 2) throw NonPositiveInput("key material needs S >= 2");
  if (length_bits <= 0 || length_bits % 8 != 0 || length_bits > 255 * 256) {
    throw NonPositiveInput("key length must be a positive multiple of 8 bits, at most 65280");
  }
  std::unique_ptr<EVP_KDF, KdfDeleter> kdf(EVP_KDF_fetch(nullptr, "HKDF", nullptr));
  if (!kdf) throw Error("HKDF is unavailable in this OpenSSL build");
  std::unique_ptr<EVP_KDF_CTX, KdfDeleter> kctx(EVP_KDF_CTX_new(kdf.get()));

  auto ikm = to_big_endian(s);
  std::string salt(kSalt), info(label), digest = "SHA256";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_KDF_PARAM_DIGEST, digest.data(), 0),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_KEY, ikm.data(), ikm.size()),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_SALT, salt.data(), salt.size()),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_INFO, info.data(), info.size()),
      OSSL_PARAM_construct_end()};

  DerivedKey key;
  key.source_secret = s;
  key.bits.resize(static_cast<std::size_t>(length_bits / 8));
  if (EVP_KDF_derive(kctx.get(), key.bits.data(), key.bits.size(), params) != 1) {
    throw Error("HKDF derivation failed");
  }
  return key;
}

Agreement group_agreement(std::span<const std::optional<mpz_class>> secrets) {
  Agreement a;
  if (secrets.empty()) return a;
  std::map<mpz_class, int> counts;
  bool all_ok = true;
  for (const auto& s : secrets) {
    if (s) {
      ++counts[*s];
    } else {
      all_ok = false;
    }
  }
  int best = 0;
  for (const auto& [value, count] : counts) best = std::max(best, count);
  a.agreeing_fraction = static_cast<double>(best) / static_cast<double>(secrets.size());
  a.agreed = all_ok && counts.size() == 1;
  return a;
}

}  // namespace otakey
