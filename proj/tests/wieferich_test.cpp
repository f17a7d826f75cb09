#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pkin/wieferich.hpp"

namespace pkin {
namespace {

bool naive_wieferich(std::uint64_t p) {
  mpz_class sq = mpz_class(p) * p, r = 1;
  for (std::uint64_t k = 0; k < p - 1; ++k) r = (r * 2) % sq;
  return r == 1;
}

TEST(Wieferich, KnownPrimes) {
  EXPECT_TRUE(is_wieferich(Nat(1093)));
  EXPECT_TRUE(is_wieferich(Nat(3511)));
  EXPECT_FALSE(is_wieferich(Nat(3)));
  EXPECT_FALSE(is_wieferich(Nat(1091)));
  EXPECT_THROW(is_wieferich(Nat(1095)), domain_error);
}

TEST(Wieferich, AgreesWithRepeatedDoubling) {
  for (auto p : oracle::primes_upto(4000)) {
    if (p == 2) continue;
    ASSERT_EQ(is_wieferich(to_nat(p)), naive_wieferich(p)) << p;
  }
}

TEST(Wieferich, ScanToTenThousand) {
  auto records = wieferich_scan(10000);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].p, 1093);
  EXPECT_TRUE(records[0].kinship.in_b);
  EXPECT_EQ(*records[0].kinship.brother, 1091);
  EXPECT_FALSE(records[0].cousin_scan);
  EXPECT_EQ(records[1].p, 3511);
  EXPECT_FALSE(records[1].kinship.in_b);
  ASSERT_TRUE(records[1].cousin_scan);
  EXPECT_EQ(*records[1].cousin_scan->witness, Nat(3511) + pow2(44));
  EXPECT_TRUE(verify_certificate(records[1].kinship.certificate));
  EXPECT_TRUE(verify_certificate(*records[1].cousin_scan->certificate));
}

TEST(Wieferich, ThreadsDoNotChangeTheResult) {
  WieferichOptions opts;
  opts.threads = 4;
  auto records = wieferich_scan(1000000, opts);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].p, 1093);
  EXPECT_EQ(records[1].p, 3511);
}

TEST(Wieferich, Bounds) {
  EXPECT_THROW(wieferich_scan(2), domain_error);
  EXPECT_THROW(wieferich_scan(std::uint64_t{1} << 33), resource_error);
  EXPECT_TRUE(wieferich_scan(1000).empty());
}

}  // namespace
}  // namespace pkin
