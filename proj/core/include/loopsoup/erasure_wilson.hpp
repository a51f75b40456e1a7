#pragma once

#include <cstdint>
#include <vector>

#include "loopsoup/green_kernel.hpp"
#include "loopsoup/loops.hpp"
#include "loopsoup/random.hpp"

namespace loopsoup {

struct ErasedLoop {
  MarkedLoop loop;
  std::vector<std::size_t> source;  // input visit index of each loop visit
};

/// Chronological loop erasure of a path: the self-avoiding skeleton (each
/// skeleton point keeps its last visit) and the erased loops in the order
/// they were closed.
struct ErasureResult {
  std::vector<NodeIndex> skeleton;
  std::vector<double> skeleton_holding;
  std::vector<std::size_t> skeleton_source;
  NodeIndex endpoint = kCemetery;
  std::vector<ErasedLoop> erased;
};

ErasureResult loop_erase(const Path& path);

// Node sequence rebuilt by merging skeleton and erased visits in input
// order; equals the input path's visits.
std::vector<NodeIndex> replay(const ErasureResult& r);

// Killed-path law (target = kCemetery): prod C along eta * kappa_{last} *
// det(G|eta). Bridge law (target = y): prod C along eta * det(G|eta).
// Returns 0 when eta uses a non-edge.
double be_exact_law(const PotentialBundle& b, NodeIndex x, NodeIndex target,
                    const std::vector<NodeIndex>& eta);

/// Rooted spanning tree of the graph extended by the cemetery: parent[x] is
/// a neighbor of x or kCemetery.
struct SpanningTree {
  std::vector<NodeIndex> parent;
  friend bool operator==(const SpanningTree&, const SpanningTree&) = default;
  friend auto operator<=>(const SpanningTree&, const SpanningTree&) = default;
};

// Throws ValidationError unless `t` is a spanning tree of `g` rooted at the
// cemetery (every node reaches it, links are edges or killing links).
void check_tree(const GraphModel& g, const SpanningTree& t);

// Z_e prod C over tree links (kappa for links to the cemetery).
double tree_weight(const PotentialBundle& b, const SpanningTree& t);

struct WeightedTree {
  SpanningTree tree;
  double weight = 0.0;
};

// All rooted spanning trees (at most 8 nodes), sorted.
std::vector<WeightedTree> enumerate_spanning_trees(const PotentialBundle& b);

struct WilsonResult {
  SpanningTree tree;
  std::vector<MarkedLoop> erased;  // nontrivial erased loops of all branches
  Vector occupation;               // all holding time, skeletons included
};

// Wilson's algorithm with branches started in `order` (default: node order).
WilsonResult wilson_sample(const PotentialBundle& b, RandomStream& rng,
                           const std::vector<NodeIndex>& order = {},
                           std::uint64_t max_steps = 1'000'000'000ULL);

// Total traversal counts and occupation of a set of loops.
NetworkSummary network_summary(const std::vector<MarkedLoop>& loops, std::size_t n);

}  // namespace loopsoup
