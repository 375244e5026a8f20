#include <bit>

#include "doctest.h"

#include "otakey/errors.hpp"
#include "otakey/keyderive.hpp"

using namespace otakey;

// Reference values computed independently with pyca/cryptography's HKDF.
TEST_CASE("derive_key matches reference HKDF-SHA256 output") {
  CHECK(derive_key(30, 256, "t").hex() == "d2bbeb6190f00cc08c0bb5bc9e77f64940347031f9fa16ab28882961fd204e46");
  mpz_class m127 = (mpz_class(1) << 127) - 1;
  CHECK(derive_key(m127, 512).hex() ==
        "d6fdbe8b75c1fdda51c730824ae0a00cdcb1495ac8bc1dd9499194664e00fbd2"
        "a9e0b4537b08d2ff693b0e69d4a9192e9bb72aa3416c67eb3467b4051408e3e4");
}

TEST_CASE("derive_key is deterministic and label separated") {
  DerivedKey a = derive_key(30, 256, "t");
  CHECK(a == derive_key(30, 256, "t"));
  CHECK(a.bits.size() == 32);
  CHECK(a.hex().size() == 64);
  CHECK(a.source_secret == 30);
  CHECK(a.bits != derive_key(30, 256, "u").bits);
  CHECK(derive_key(30, 128, "t").bits.size() == 16);
}

TEST_CASE("derive_key rejects bad input") {
  CHECK_THROWS_AS(derive_key(1), NonPositiveInput);
  CHECK_THROWS_AS(derive_key(30, 100), NonPositiveInput);
  CHECK_THROWS_AS(derive_key(30, 0), NonPositiveInput);
}

TEST_CASE("neighbouring secrets give unrelated keys") {
  int worst_low = 256, worst_high = 0;
  double total = 0;
  for (int k = 0; k < 1000; ++k) {
    std::string label = "label-" + std::to_string(k);
    DerivedKey a = derive_key(30, 256, label), b = derive_key(31, 256, label);
    int distance = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) distance += std::popcount(static_cast<unsigned>(a.bits[i] ^ b.bits[i]));
    worst_low = std::min(worst_low, distance);
    worst_high = std::max(worst_high, distance);
    total += distance;
  }
  CHECK(worst_low >= 88);
  CHECK(worst_high <= 168);
  CHECK(total / 1000 == doctest::Approx(128).epsilon(0.02));
}

TEST_CASE("big-endian encoding") {
  CHECK(to_big_endian(30) == std::vector<unsigned char>{30});
  CHECK(to_big_endian(0x1234) == std::vector<unsigned char>{0x12, 0x34});
}

TEST_CASE("group_agreement examples") {
  using V = std::vector<std::optional<mpz_class>>;
  V all = {mpz_class(6), mpz_class(6), mpz_class(6)};
  Agreement a = group_agreement(all);
  CHECK(a.agreed);
  CHECK(a.agreeing_fraction == 1.0);

  V failed = {mpz_class(6), mpz_class(6), std::nullopt};
  a = group_agreement(failed);
  CHECK_FALSE(a.agreed);
  CHECK(a.agreeing_fraction == doctest::Approx(2.0 / 3));

  V split = {mpz_class(6), mpz_class(10), mpz_class(6)};
  a = group_agreement(split);
  CHECK_FALSE(a.agreed);
  CHECK(a.agreeing_fraction == doctest::Approx(2.0 / 3));

  CHECK_FALSE(group_agreement(V{}).agreed);
}
