#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "loopsoup/gff.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;
using namespace testing_support;

TEST(Field, FactorReproducesGreen) {
  const PotentialBundle b(pn(20));
  const FieldSampler f(b);
  EXPECT_LT((f.factor() * f.factor().transpose() - b.green()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Field, EmpiricalCovariance) {
  const PotentialBundle b(t3());
  const FieldSampler f(b);
  auto st = run_replicas(
      1, 1, 50000, 9,
      [&](RandomStream& rng, std::span<double> o) {
        const Vector phi = f.sample(rng);
        for (int x = 0; x < 3; ++x) {
          for (int y = 0; y < 3; ++y) o[3 * x + y] = phi(x) * phi(y);
        }
      },
      1);
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) EXPECT_NEAR(st[3 * x + y].mean(), b.green(x, y), 4.0 * st[3 * x + y].std_error());
  }
}

TEST(Field, CopiesAndHalfSquares) {
  const PotentialBundle b(g2());
  RandomStream r(3, 3);
  const auto s = gff_sample(b, 3, r);
  ASSERT_EQ(s.copies.size(), 3u);
  Vector half = Vector::Zero(2);
  for (const auto& c : s.copies) half += 0.5 * c.cwiseAbs2();
  EXPECT_LT((half - s.half_square_sum()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(s.sigma(0), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(gff_sample(b, 0, r), std::exception);
}

TEST(Field, WickSquaresAreOrthogonal) {
  const PotentialBundle b(g2());
  const FieldSampler f(b);
  const double s = b.green(0, 0), c = b.green(0, 1);
  auto st = run_replicas(
      2, 2, 100000, 3,
      [&](RandomStream& rng, std::span<double> o) {
        const Vector phi = f.sample(rng);
        o[0] = wick_power(phi(0), s, 2);
        o[1] = wick_power(phi(0), s, 2) * wick_power(phi(1), s, 2);
        o[2] = wick_power(phi(0), s, 1) * wick_power(phi(1), s, 2);
      },
      1);
  EXPECT_NEAR(st[0].mean(), 0.0, 4.0 * st[0].std_error());
  EXPECT_NEAR(st[1].mean(), 2.0 * c * c, 4.0 * st[1].std_error());
  EXPECT_NEAR(st[2].mean(), 0.0, 4.0 * st[2].std_error());
}
