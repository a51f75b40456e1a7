#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "loopsoup/green_kernel.hpp"
#include "loopsoup/loops.hpp"
#include "loopsoup/random.hpp"

namespace loopsoup {

enum class TrivialMode { Aggregate, Resolved };

// Sampling scheme for the nontrivial loops.
//  LengthBridge: length k from Tr(P^k)/k, base point from diag(P^k), then a
//                bridge through precomputed powers of P.
//  Rooted:       loops grouped by their smallest node j; visits to j are
//                negative binomial, excursions are Doob-conditioned walks in
//                {j, ..., n-1}, and a Chinese-restaurant(alpha) permutation
//                groups the excursions into loops.
//  Auto:         LengthBridge when its power table stays below 4e6 entries.
enum class SoupEngine { Auto, LengthBridge, Rooted };

struct SoupOptions {
  double alpha = 1.0;
  TrivialMode mode = TrivialMode::Aggregate;
  double eps = 0.0;  // resolved mode threshold
  SoupEngine engine = SoupEngine::Auto;
};

struct TrivialLoop {
  NodeIndex node;
  double holding;
};

/// One realization of the Poisson loop ensemble L_alpha.
struct LoopSoup {
  double alpha = 1.0;
  TrivialMode mode = TrivialMode::Aggregate;
  double eps = 0.0;
  std::vector<MarkedLoop> loops;           // nontrivial loops
  std::vector<TrivialLoop> trivial_loops;  // resolved one-point loops (holding > eps)
  Vector trivial_occupation;               // one-point loop time (resolved: sub-eps part only)

  std::size_t size() const { return static_cast<std::size_t>(trivial_occupation.size()); }

  // Occupation field: nontrivial loops plus every one-point loop.
  Vector occupation() const;
  // Occupation carried by nontrivial loops only.
  Vector nontrivial_occupation() const;
  // Traversal counts N_{x,y} of the nontrivial loops.
  Matrix traversals() const;
  // N_x = number of visits to x by nontrivial loops.
  std::vector<std::uint64_t> visit_counts() const;
  NetworkSummary network() const { return {traversals(), occupation()}; }
};

class SoupSampler {
 public:
  SoupSampler(const PotentialBundle& b, SoupOptions options);
  ~SoupSampler();
  SoupSampler(SoupSampler&&) noexcept;
  SoupSampler& operator=(SoupSampler&&) noexcept;

  LoopSoup sample(RandomStream& rng) const;

  // Samples only the nontrivial loops, appending to `out`.
  void sample_nontrivial(RandomStream& rng, std::vector<MarkedLoop>& out) const;

  const SoupOptions& options() const { return options_; }
  SoupEngine engine() const { return engine_; }
  // Mass of nontrivial loops used by the sampler (truncated for
  // LengthBridge).
  double nontrivial_mass() const { return mass_; }
  std::size_t truncation() const { return kmax_; }

 private:
  struct LengthTables;
  struct RootedTables;

  void sample_length_bridge(RandomStream& rng, std::vector<MarkedLoop>& out) const;
  void sample_rooted(RandomStream& rng, std::vector<MarkedLoop>& out) const;
  void add_trivial(RandomStream& rng, LoopSoup& soup) const;

  const PotentialBundle* bundle_;
  SoupOptions options_;
  SoupEngine engine_;
  double mass_ = 0.0;
  std::size_t kmax_ = 0;
  std::unique_ptr<LengthTables> length_;
  std::unique_ptr<RootedTables> rooted_;
};

// Convenience wrapper: one soup with a fresh sampler.
LoopSoup sample_soup(const PotentialBundle& b, const SoupOptions& options, RandomStream& rng);

// L~^x = occupation_x - alpha G^{x,x}.
Vector centered_occupation(const LoopSoup& soup, const PotentialBundle& b);

// Expected number of one-point loops with holding time above eps at x:
// alpha E1(lambda_x eps).
double expected_resolved_trivial(const PotentialBundle& b, double alpha, NodeIndex x, double eps);

// log P(DL_alpha = multiset): -alpha mu(p>1) + sum log(alpha mass(class))
// - sum log(multiplicity!).
double soup_log_density(const PotentialBundle& b, double alpha,
                        const std::vector<DiscreteLoopClass>& classes);

// sum over nontrivial loops of sum omega^{x_i, x_{i+1}}.
double current_sum(const LoopSoup& soup, const Current& omega);
double current_sum(const MarkedLoop& loop, const Current& omega);

// Multiple local time l^{x_1..x_n} of a loop for pairwise distinct points:
// sum over cyclic shifts of the points of sum over increasing visit indices
// i_1 < ... < i_n matching the shifted points of prod holding.
double loop_multiple_local_time(const MarkedLoop& loop, const std::vector<NodeIndex>& points);

/// Exact sampler of the normalized bridge measure mu^{x,y} / G^{x,y} for a
/// fixed target y: Doob first passage to y with h(z) = G^{z,y} / G^{y,y},
/// then a geometric number of return excursions.
class BridgeSampler {
 public:
  BridgeSampler(const PotentialBundle& b, NodeIndex target);
  Path sample(NodeIndex from, RandomStream& rng) const;
  NodeIndex target() const { return target_; }

 private:
  NodeIndex step(NodeIndex z, RandomStream& rng) const;

  const PotentialBundle* bundle_;
  NodeIndex target_;
  double return_stop_ = 0.0;  // 1 / (lambda_y G^{y,y})
  std::vector<std::vector<std::pair<NodeIndex, double>>> cumulative_;
};

Path sample_bridge(const PotentialBundle& b, NodeIndex x, NodeIndex y, RandomStream& rng);

// Path of the sub-stochastic chain from x until it is killed.
Path sample_killed_path(const PotentialBundle& b, NodeIndex x, RandomStream& rng,
                        std::uint64_t max_steps = 1'000'000'000ULL);

}  // namespace loopsoup
