#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "loopsoup/random.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;

TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  EXPECT_EQ(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, DeterministicPerSeedAndStream) {
  RandomStream a(5, 9), b(5, 9), c(5, 10), d(6, 9);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
  }
}

TEST(RandomStream, SubstreamsAreDistinct) {
  const RandomStream root(1, 2);
  std::set<std::uint64_t> first;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    auto s = root.substream(i);
    first.insert(s());
  }
  EXPECT_EQ(first.size(), 1000u);
}

TEST(RandomStream, UniformIsOpenAndBelowInRange) {
  RandomStream r(0, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(7), 7u);
  }
  EXPECT_THROW(r.below(0), std::exception);
}

namespace {

// Mean and variance of a sampler against their exact values, 4 SE.
template <class F>
void check_moments(F f, double mean, double var, std::uint64_t n = 200000) {
  RunningStats s, s2;
  RandomStream r(11, 17);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = f(r);
    s.add(x);
    s2.add((x - mean) * (x - mean));
  }
  EXPECT_NEAR(s.mean(), mean, 4.0 * s.std_error());
  EXPECT_NEAR(s2.mean(), var, 4.0 * s2.std_error());
}

}  // namespace

TEST(RandomStream, DistributionMoments) {
  check_moments([](RandomStream& r) { return r.uniform(); }, 0.5, 1.0 / 12.0);
  check_moments([](RandomStream& r) { return r.exponential(2.0); }, 0.5, 0.25);
  check_moments([](RandomStream& r) { return r.normal(); }, 0.0, 1.0);
  for (double a : {0.3, 1.0, 2.5, 7.0}) check_moments([a](RandomStream& r) { return r.gamma(a); }, a, a);
  check_moments([](RandomStream& r) { return r.beta(2.0, 3.0); }, 0.4, 0.04);
  for (double m : {0.2, 5.0, 40.0, 700.0}) {
    check_moments([m](RandomStream& r) { return static_cast<double>(r.poisson(m)); }, m, m);
  }
  check_moments([](RandomStream& r) { return static_cast<double>(r.geometric(0.25)); }, 3.0, 12.0);
}

TEST(RandomStream, Mix64IsABijectionOnSamples) {
  std::set<std::uint64_t> out;
  for (std::uint64_t i = 0; i < 10000; ++i) out.insert(mix64(i));
  EXPECT_EQ(out.size(), 10000u);
  EXPECT_NE(mix64(0), 0u);
}
