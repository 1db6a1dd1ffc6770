#include "dovetail/bitstring.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <set>
#include <string>

#include "dovetail/rng.hpp"
#include "dovetail/sources.hpp"

using namespace dovetail;

TEST(BitString, BasicRoundTrip) {
  BitString s = BitString::from_string("0101");
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s.to_string(), "0101");
  EXPECT_EQ(s.bit(0), 0);
  EXPECT_EQ(s.bit(1), 1);
  EXPECT_THROW(BitString::from_string("01x"), std::invalid_argument);
}

TEST(BitString, PrefixDefinedOnlyUpToLength) {
  BitString s = BitString::from_string("110");
  EXPECT_EQ(s.prefix(2).to_string(), "11");
  EXPECT_EQ(s.prefix(0).to_string(), "");
  EXPECT_THROW(s.prefix(4), std::out_of_range);
}

TEST(IndexToProgramBits, FirstValues) {
  // Length-then-lex order: eps, 0, 1, 00, 01, 10, 11, ...
  EXPECT_EQ(index_to_program_bits(0).to_string(), "");
  EXPECT_EQ(index_to_program_bits(1).to_string(), "0");
  EXPECT_EQ(index_to_program_bits(2).to_string(), "1");
  EXPECT_EQ(index_to_program_bits(6).to_string(), "11");
}

TEST(IndexToProgramBits, BijectionOverPrefix) {
  // Every string of length <= L appears exactly once among the first
  // 2^(L+1)-1 indexes.
  const int L = 4;
  const uint64_t count = (1ull << (L + 1)) - 1;
  std::set<std::string> seen;
  for (uint64_t n = 0; n < count; ++n) {
    BitString s = index_to_program_bits(n);
    EXPECT_LE(s.size(), static_cast<std::size_t>(L));
    EXPECT_TRUE(seen.insert(s.to_string()).second) << "duplicate at " << n;
    EXPECT_EQ(program_bits_to_index(s), n);
  }
  EXPECT_EQ(seen.size(), count);
}

TEST(CantorPair, FixedConvention) {
  // code = (a+b)(a+b+1)/2 + b
  EXPECT_EQ(cantor_pair(0, 0), 0u);
  EXPECT_EQ(cantor_pair(1, 0), 1u);
  EXPECT_EQ(cantor_pair(0, 1), 2u);
  EXPECT_EQ(cantor_pair(4, 0), 10u);
  auto [a, b] = cantor_unpair(14);
  EXPECT_EQ(a, 0u);
  EXPECT_EQ(b, 4u);
  EXPECT_EQ(cantor_pair(0, 4), 14u);
}

TEST(CantorPair, RoundTrip) {
  SplitMix64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const uint64_t a = rng.next_u64() % 100000;
    const uint64_t b = rng.next_u64() % 100000;
    auto [a2, b2] = cantor_unpair(cantor_pair(a, b));
    EXPECT_EQ(a2, a);
    EXPECT_EQ(b2, b);
  }
  // Codes are dense: unpair then pair is the identity too.
  for (uint64_t code = 0; code < 5000; ++code) {
    auto [a, b] = cantor_unpair(code);
    EXPECT_EQ(cantor_pair(a, b), code);
  }
}

TEST(Hamming, Examples) {
  EXPECT_EQ(hamming_distance(BitString::from_string("0101"), BitString::from_string("0101")), 0u);
  EXPECT_EQ(hamming_distance(BitString::from_string("0000"), BitString::from_string("1111")), 4u);
  EXPECT_EQ(hamming_distance(BitString::from_string("0110"), BitString::from_string("0011")), 2u);
  EXPECT_THROW(hamming_distance(BitString::from_string("01"), BitString::from_string("0")),
               std::invalid_argument);
}

TEST(Hamming, MetricProperties) {
  SplitMix64 rng(99);
  auto random_string = [&](std::size_t len) {
    BitString s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(rng.next_bit());
    return s;
  };
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t len = 1 + rng.next_u64() % 40;
    BitString x = random_string(len), y = random_string(len), z = random_string(len);
    EXPECT_EQ(hamming_distance(x, x), 0u);
    EXPECT_EQ(hamming_distance(x, y), hamming_distance(y, x));
    EXPECT_LE(hamming_distance(x, z), hamming_distance(x, y) + hamming_distance(y, z));
    if (hamming_distance(x, y) == 0) {
      EXPECT_EQ(x, y);
    }
  }
}

TEST(PairCode, FieldsStayConsistent) {
  PairCode pc = make_pair_code(7, 1);
  EXPECT_EQ(pc.left, 7u);
  EXPECT_EQ(pc.right, 1u);
  EXPECT_EQ(pc.code, 37u);
}

TEST(CoinSource, SameSeedReplaysIdentically) {
  CoinSource a(12345), b(12345);
  EXPECT_EQ(a.prefix(256), b.prefix(256));
}

TEST(ProgramSource, ThrowsWhenProgramHalts) {
  // [OUT1] emits one bit and halts; asking for a second bit is an error
  // because chooser streams must be infinite.
  ProgramSource src(Program::from_string("001"));
  EXPECT_EQ(src.bit(0), 1);
  EXPECT_THROW(src.bit(1), std::runtime_error);
}

TEST(NoisySource, FlipsAtTheConfiguredRate) {
  auto inner = std::make_unique<ProgramSource>(Program::from_string("000101000000"));
  NoisySource noisy(std::move(inner), 0.25, 9001);
  const std::size_t n = 20'000;
  std::size_t flips = 0;
  for (std::size_t i = 0; i < n; ++i) flips += static_cast<std::size_t>(noisy.bit(i) != 0);
  EXPECT_NEAR(static_cast<double>(flips) / n, 0.25, 0.02);
}

TEST(NoisySource, RejectsRateOutsideHalfOpenInterval) {
  EXPECT_THROW(NoisySource(std::make_unique<CoinSource>(1), 0.5, 2), std::invalid_argument);
}

TEST(CoinSource, EmittedBitsNeverChange) {
  CoinSource a(42);
  BitString first = a.prefix(64);
  a.prefix(512);
  EXPECT_EQ(a.prefix(64), first);
  EXPECT_EQ(a.bits_emitted(), 512u);
}

TEST(CoinSource, DifferentSeedsDiverge) {
  // Two distinct seeds should differ somewhere in the first 64 bits; the
  // failure probability per pair is 2^-64.
  SplitMix64 rng(0xC0FFEE);
  for (int i = 0; i < 50; ++i) {
    const uint64_t s1 = rng.next_u64();
    const uint64_t s2 = rng.next_u64();
    if (s1 == s2) continue;
    CoinSource a(s1), b(s2);
    EXPECT_NE(a.prefix(64), b.prefix(64));
  }
}

TEST(SplitMix64, SplitGivesIndependentStream) {
  SplitMix64 parent(5);
  SplitMix64 child = parent.split();
  EXPECT_NE(parent.next_u64(), child.next_u64());
}
