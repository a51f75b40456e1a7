#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/experiments.hpp"

using namespace loopsoup;
using namespace testing_support;

namespace {

SuiteConfig small(unsigned threads) {
  SuiteConfig c;
  c.samples = 3000;
  c.seed = 11;
  c.threads = threads;
  return c;
}

}  // namespace

TEST(Experiments, PayloadIndependentOfThreads) {
  const auto g = t3();
  const auto a = run_soup_suite(g, 1.5, small(1)).payload_json();
  EXPECT_EQ(a, run_soup_suite(g, 1.5, small(1)).payload_json());
  EXPECT_EQ(a, run_soup_suite(g, 1.5, small(3)).payload_json());
  const auto w = run_wilson_suite(g, small(1)).payload_json();
  EXPECT_EQ(w, run_wilson_suite(g, small(2)).payload_json());
}

TEST(Experiments, SmallRunsStillProduceVerdicts) {
  SuiteConfig c = small(1);
  c.samples = 10;
  const auto r = run_soup_suite(g2(), 1.0, c);
  EXPECT_FALSE(r.entries().empty());
  (void)r.passed();
  c.samples = 0;
  EXPECT_THROW(dynkin_moment_report(PotentialBundle(g2()), 1, c), ValidationError);
}

TEST(Experiments, ArgumentChecks) {
  EXPECT_THROW(run_branching_demo(7, 1.0, small(1)), ValidationError);
  EXPECT_THROW(run_zeta_suite(g2(), 1.0, small(1)), ValidationError);
  EXPECT_THROW(dynkin_moment_report(PotentialBundle(g2()), 0, small(1)), ValidationError);
}

TEST(Experiments, Helpers) {
  RandomStream rng(1, 1);
  for (std::size_t n = 1; n <= 8; ++n) EXPECT_EQ(random_er_graph(n, rng).size(), n);
  const auto chis = test_chis(4, 3);
  ASSERT_EQ(chis.size(), 3u);
  for (const auto& c : chis) EXPECT_GE(c.minCoeff(), 0.0);
  const auto g = t3();
  const auto w = cycle_current(g, 0.5);
  EXPECT_DOUBLE_EQ(w(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(w(2, 0), 0.5);
  EXPECT_DOUBLE_EQ(w(0, 2), -0.5);
}

TEST(Experiments, ExactSuitePassesOnFixtures) {
  for (const auto& g : {g2(), t3(), p3(), pn(8)}) EXPECT_TRUE(run_verify_exact(g).passed());
}
