#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/experiments.hpp"
#include "loopsoup/graph_io.hpp"
#include "loopsoup/loop_measure.hpp"
#include "loopsoup/loop_soup.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;
using namespace testing_support;

namespace {

void expect_valid_loops(const GraphModel& g, const LoopSoup& s) {
  for (const auto& l : s.loops) {
    ASSERT_GE(l.length(), 2u);
    ASSERT_EQ(l.holding.size(), l.length());
    for (std::size_t i = 0; i < l.length(); ++i) {
      ASSERT_TRUE(g.has_edge(l.visits[i], l.visits[(i + 1) % l.length()]));
      ASSERT_GT(l.holding[i], 0.0);
    }
  }
}

}  // namespace

TEST(LoopSoup, SameSeedSameSoup) {
  const auto g = t3();
  const PotentialBundle b(g);
  for (auto mode : {TrivialMode::Aggregate, TrivialMode::Resolved}) {
    const SoupOptions opt{1.5, mode, 0.05, SoupEngine::Auto};
    RandomStream r1(8, 1), r2(8, 1), r3(9, 1);
    const auto a = soup_to_jsonl(g, sample_soup(b, opt, r1), 8);
    EXPECT_EQ(a, soup_to_jsonl(g, sample_soup(b, opt, r2), 8));
    EXPECT_NE(a, soup_to_jsonl(g, sample_soup(b, opt, r3), 8));
  }
}

TEST(LoopSoup, LoopsAreValidAndOccupationAdds) {
  for (const auto& g : {g2(), t3(), pn(16)}) {
    const PotentialBundle b(g);
    for (auto engine : {SoupEngine::LengthBridge, SoupEngine::Rooted}) {
      const SoupSampler s(b, SoupOptions{2.0, TrivialMode::Resolved, 0.1, engine});
      RandomStream r(1, 2);
      for (int i = 0; i < 200; ++i) {
        const auto soup = s.sample(r);
        expect_valid_loops(g, soup);
        // trivial_occupation holds only the sub-eps remainder here
        Vector occ = soup.trivial_occupation;
        for (const auto& l : soup.loops) l.add_occupation(occ);
        for (const auto& t : soup.trivial_loops) {
          EXPECT_GT(t.holding, 0.1);
          occ(t.node) += t.holding;
        }
        EXPECT_LT((occ - soup.occupation()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_GE(soup.trivial_occupation.minCoeff(), 0.0);
      }
    }
  }
}

TEST(LoopSoup, RejectsBadOptions) {
  const PotentialBundle b(g2());
  EXPECT_THROW(SoupSampler(b, SoupOptions{0.0}), ValidationError);
  EXPECT_THROW(SoupSampler(b, SoupOptions{1.0, TrivialMode::Resolved, 0.0}), ValidationError);
}

// Both engines reproduce E L^x = alpha G^{x,x} and the mean loop count.
TEST(LoopSoup, EnginesAgreeWithExactMeans) {
  for (const auto& g : {t3(), pn(12)}) {
    const PotentialBundle b(g);
    for (auto engine : {SoupEngine::LengthBridge, SoupEngine::Rooted}) {
      const double alpha = 0.7;
      const SoupSampler s(b, SoupOptions{alpha, TrivialMode::Aggregate, 0.0, engine});
      const auto n = g.size();
      auto st = run_replicas(
          3, 5, 40000, n + 2,
          [&](RandomStream& rng, std::span<double> o) {
            const auto soup = s.sample(rng);
            const Vector L = soup.occupation();
            for (std::size_t x = 0; x < n; ++x) o[x] = L(x);
            o[n] = static_cast<double>(soup.loops.size());
            double jumps = 0.0;
            for (const auto& l : soup.loops) jumps += static_cast<double>(l.length());
            o[n + 1] = jumps;
          },
          1);
      for (std::size_t x = 0; x < n; ++x) EXPECT_NEAR(st[x].mean(), alpha * b.green(x, x), 4.0 * st[x].std_error());
      EXPECT_NEAR(st[n].mean(), alpha * nontrivial_mass(b), 4.0 * st[n].std_error());
      EXPECT_NEAR(st[n + 1].mean(), alpha * expected_jump_count(b), 4.0 * st[n + 1].std_error());
    }
  }
}

TEST(LoopSoup, LongPathUsesRootedEngine) {
  const PotentialBundle b(pn(64));
  const SoupSampler s(b, SoupOptions{});
  EXPECT_EQ(s.engine(), SoupEngine::Rooted);
  RandomStream r(0, 0);
  expect_valid_loops(b.model(), s.sample(r));
}

TEST(LoopSoup, ResolvedTrivialCount) {
  const PotentialBundle b(g2());
  EXPECT_NEAR(expected_resolved_trivial(b, 1.5, 0, 0.01), 1.5 * expint_e1(0.02), 1e-14);
}

TEST(LoopSoup, LogDensity) {
  const PotentialBundle b(g2());
  const auto ab = DiscreteLoopClass::make(b.model(), {0, 1});
  const double alpha = 1.7;
  EXPECT_NEAR(soup_log_density(b, alpha, {}), alpha * std::log(0.75), 1e-15);
  EXPECT_NEAR(soup_log_density(b, alpha, {ab}), alpha * std::log(0.75) + std::log(alpha * 0.25), 1e-15);
  EXPECT_NEAR(soup_log_density(b, alpha, {ab, ab}),
              alpha * std::log(0.75) + 2.0 * std::log(alpha * 0.25) - std::log(2.0), 1e-14);
}

TEST(LoopSoup, MultipleLocalTimes) {
  MarkedLoop two{{0, 1, 0, 1}, {0.1, 0.2, 0.3, 0.4}};
  // for two distinct points l^{x,y} = l^x l^y
  EXPECT_NEAR(loop_multiple_local_time(two, {0, 1}), 0.4 * 0.6, 1e-15);
  MarkedLoop tri{{0, 1, 2}, {0.5, 0.25, 2.0}};
  EXPECT_NEAR(loop_multiple_local_time(tri, {0, 1, 2}), 0.25, 1e-15);
  EXPECT_NEAR(loop_multiple_local_time(tri, {1, 2, 0}), 0.25, 1e-15);
  EXPECT_NEAR(loop_multiple_local_time(tri, {0, 2, 1}), 0.0, 1e-15);
}

TEST(LoopSoup, CurrentSums) {
  const auto g = t3();
  const auto w = cycle_current(g, 0.4);
  EXPECT_NEAR(current_sum(MarkedLoop{{0, 1, 2}, {1, 1, 1}}, w), 1.2, 1e-15);
  EXPECT_NEAR(current_sum(MarkedLoop{{0, 2, 1}, {1, 1, 1}}, w), -1.2, 1e-15);
  EXPECT_NEAR(current_sum(MarkedLoop{{0, 1}, {1, 1}}, w), 0.0, 1e-15);
}

TEST(Bridge, PathShapeAndOccupationMean) {
  const auto g = t3();
  const PotentialBundle b(g);
  const NodeIndex x = 0, y = 2;
  const BridgeSampler bs(b, y);
  auto st = run_replicas(
      6, 6, 40000, 3,
      [&](RandomStream& rng, std::span<double> o) {
        const Path p = bs.sample(x, rng);
        EXPECT_EQ(p.visits.front(), x);
        EXPECT_EQ(p.visits.back(), y);
        EXPECT_EQ(p.endpoint, y);
        const Vector occ = p.occupation(3);
        for (std::size_t z = 0; z < 3; ++z) o[z] = occ(z);
      },
      1);
  // E occupation at z under mu^{x,y} / G^{x,y} is G^{x,z} G^{z,y} / G^{x,y}
  for (std::size_t z = 0; z < 3; ++z) {
    EXPECT_NEAR(st[z].mean(), b.green(x, z) * b.green(z, y) / b.green(x, y), 4.0 * st[z].std_error());
  }
}

TEST(KilledPath, OccupationMean) {
  const PotentialBundle b(pn(6));
  auto st = run_replicas(
      2, 2, 40000, 6,
      [&](RandomStream& rng, std::span<double> o) {
        const Path p = sample_killed_path(b, 3, rng);
        EXPECT_EQ(p.endpoint, kCemetery);
        const Vector occ = p.occupation(6);
        for (std::size_t z = 0; z < 6; ++z) o[z] = occ(z);
      },
      1);
  for (std::size_t z = 0; z < 6; ++z) EXPECT_NEAR(st[z].mean(), b.green(3, z), 4.0 * st[z].std_error());
}
