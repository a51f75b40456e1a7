#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "loopsoup/erasure_wilson.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/experiments.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;
using namespace testing_support;

TEST(LoopErasure, ChronologicalErasure) {
  // a b a c b c  ->  skeleton a c, erased loops (a b) then ... per visit order
  Path p{{0, 1, 0, 2, 1, 2}, {1, 2, 3, 4, 5, 6}, kCemetery};
  const auto r = loop_erase(p);
  EXPECT_EQ(r.skeleton, (std::vector<NodeIndex>{0, 2}));
  ASSERT_EQ(r.erased.size(), 2u);
  EXPECT_EQ(r.erased[0].loop.visits, (std::vector<NodeIndex>{0, 1}));
  EXPECT_EQ(r.erased[1].loop.visits, (std::vector<NodeIndex>{2, 1}));
  EXPECT_EQ(replay(r), p.visits);
  EXPECT_EQ(r.skeleton_holding, (std::vector<double>{3, 6}));
}

TEST(LoopErasure, ReplayRoundTripOnRandomPaths) {
  const PotentialBundle b(t3());
  RandomStream rng(5, 5);
  for (int i = 0; i < 500; ++i) {
    const Path p = sample_killed_path(b, i % 3, rng);
    const auto r = loop_erase(p);
    EXPECT_EQ(replay(r), p.visits);
    std::vector<char> seen(3, 0);
    for (auto x : r.skeleton) {
      EXPECT_FALSE(seen[x]);
      seen[x] = 1;
    }
    double total = 0.0, kept = 0.0;
    for (double h : p.holding) total += h;
    for (double h : r.skeleton_holding) kept += h;
    for (const auto& e : r.erased) {
      for (double h : e.loop.holding) kept += h;
    }
    EXPECT_NEAR(total, kept, 1e-12);
  }
}

TEST(LoopErasure, ExactLawOnG2) {
  const PotentialBundle b(g2());
  EXPECT_NEAR(be_exact_law(b, 0, kCemetery, {0}), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(be_exact_law(b, 0, kCemetery, {0, 1}), 1.0 / 3.0, 1e-15);
  // bridge a -> b: eta = (a, b) carries all the mass G^{a,b}
  EXPECT_NEAR(be_exact_law(b, 0, 1, {0, 1}), b.green(0, 1), 1e-15);
  EXPECT_EQ(be_exact_law(PotentialBundle(p3()), 0, kCemetery, {0, 2}), 0.0);
}

TEST(LoopErasure, KilledLawSumsToOne) {
  RandomStream rng(12, 1);
  for (int rep = 0; rep < 5; ++rep) {
    const PotentialBundle b(random_er_graph(5, rng));
    const auto& g = b.model();
    double total = 0.0;
    std::vector<NodeIndex> cur{0};
    std::vector<char> used(5, 0);
    used[0] = 1;
    std::function<void()> rec = [&] {
      total += be_exact_law(b, 0, kCemetery, cur);
      for (auto w : g.neighbors(cur.back())) {
        if (used[w]) continue;
        used[w] = 1;
        cur.push_back(w);
        rec();
        cur.pop_back();
        used[w] = 0;
      }
    };
    rec();
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(SpanningTrees, EnumerationMatchesBruteForce) {
  RandomStream rng(50, 50);
  for (int rep = 0; rep < 10; ++rep) {
    const PotentialBundle b(random_er_graph(2 + rep % 5, rng));
    const auto trees = enumerate_spanning_trees(b);
    std::size_t count = 0;
    const double ref = oracle::tree_weight_sum(to_dense(b.model().conductance()), to_std(b.model().killing()), &count);
    EXPECT_EQ(trees.size(), count);
    double total = 0.0;
    for (const auto& t : trees) {
      check_tree(b.model(), t.tree);
      EXPECT_NEAR(t.weight, tree_weight(b, t.tree), 1e-15);
      total += t.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(ref * b.z_e(), 1.0, 1e-12);
    EXPECT_TRUE(std::is_sorted(trees.begin(), trees.end(),
                               [](const WeightedTree& a, const WeightedTree& c) { return a.tree < c.tree; }));
  }
}

TEST(SpanningTrees, T3Count) {
  // every node may point to the cemetery: 16 rooted forests of K3
  const PotentialBundle b(t3());
  const auto trees = enumerate_spanning_trees(b);
  EXPECT_EQ(trees.size(), 16u);
  for (const auto& t : trees) EXPECT_GT(t.weight, 0.0);
}

TEST(SpanningTrees, CheckTreeRejects) {
  const auto g = g2();
  EXPECT_THROW(check_tree(g, SpanningTree{{1, 0}}), ValidationError);
  EXPECT_THROW(check_tree(g, SpanningTree{{kCemetery}}), ValidationError);
  check_tree(g, SpanningTree{{kCemetery, 0}});
  const auto p = p3();
  EXPECT_THROW(check_tree(p, SpanningTree{{kCemetery, kCemetery, 1}}), ValidationError);
}

TEST(Wilson, TreeFrequenciesOnG2) {
  const PotentialBundle b(g2());
  const auto trees = enumerate_spanning_trees(b);
  std::map<SpanningTree, std::size_t> idx;
  for (std::size_t i = 0; i < trees.size(); ++i) idx[trees[i].tree] = i;
  std::vector<double> counts(trees.size(), 0.0), probs;
  for (const auto& t : trees) probs.push_back(t.weight);
  RandomStream rng(7, 7);
  for (int i = 0; i < 30000; ++i) {
    const auto w = wilson_sample(b, rng);
    check_tree(b.model(), w.tree);
    counts[idx.at(w.tree)] += 1.0;
  }
  EXPECT_GT(chi_square_gof(counts, probs).p_value, 0.001);
}

TEST(Wilson, OrderAndStepGuard) {
  const PotentialBundle b(t3());
  RandomStream rng(1, 1);
  EXPECT_THROW(wilson_sample(b, rng, {0, 0, 1}), ValidationError);
  EXPECT_THROW(wilson_sample(b, rng, {}, 0), std::exception);
  const auto w = wilson_sample(b, rng, {2, 1, 0});
  check_tree(b.model(), w.tree);
  const auto net = network_summary(w.erased, 3);
  EXPECT_EQ(net.traversals.rows(), 3);
}
