#include <gtest/gtest.h>

#include <cmath>

#include <set>

#include "quenchlab/rng.hpp"

using namespace quenchlab;

// Known-answer vectors of the Philox4x32-10 reference implementation.
TEST(Philox, ZeroCounterZeroKey) {
  const auto out = Philox4x32::bijection({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, AllOnes) {
  const auto out = Philox4x32::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, SameSeedSameStream) {
  Philox4x32 a(123, 7), b(123, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Philox, StreamsAndSeedsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed = 0; seed < 16; ++seed)
    for (std::uint64_t stream = 0; stream < 16; ++stream) firsts.insert(Philox4x32(seed, stream)());
  EXPECT_EQ(firsts.size(), 256u);
}

TEST(Philox, UniformRanges) {
  Philox4x32 rng(5);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open_zero();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    sum += u;
  }
  // mean 1/2, sd of the mean sqrt(1/12/n)
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Philox, SeedAccessors) {
  Philox4x32 rng(0x0123456789abcdefull, 42);
  EXPECT_EQ(rng.seed(), 0x0123456789abcdefull);
  EXPECT_EQ(rng.stream(), 42u);
}

TEST(DeriveSeed, DistinctIndices) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(9, i));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}
