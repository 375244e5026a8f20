#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace otakey {

struct DerivedKey {
  std::vector<unsigned char> bits;  // length_bits / 8 bytes
  mpz_class source_secret;

  std::string hex() const;  // lowercase
  friend bool operator==(const DerivedKey&, const DerivedKey&) = default;
};

// Big-endian magnitude bytes of s, no leading zeros.
std::vector<unsigned char> to_big_endian(const mpz_class& s);

// HKDF-SHA256 (extract then expand) over the big-endian encoding of S, with a
// fixed salt and `label` as the info string. length_bits must be a positive
// multiple of 8, at most 255 * 256. Throws NonPositiveInput for S < 2.
DerivedKey derive_key(const mpz_class& s, int length_bits = 256, std::string_view label = "otakey");

struct Agreement {
  bool agreed = false;
  double agreeing_fraction = 0.0;  // size of the largest identical group / N
};

// agreed iff every user recovered and all values are identical.
Agreement group_agreement(std::span<const std::optional<mpz_class>> secrets);

}  // namespace otakey
