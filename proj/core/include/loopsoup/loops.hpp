#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "loopsoup/graph_model.hpp"

namespace loopsoup {

// Cemetery marker used as a path endpoint and as a tree parent.
inline constexpr NodeIndex kCemetery = std::numeric_limits<NodeIndex>::max();

/// Discrete loop up to rotation: a cyclic node sequence (x_1, ..., x_k),
/// k >= 2, whose consecutive pairs (with x_{k+1} = x_1) are edges.
class DiscreteLoopClass {
 public:
  // Validates the cycle against `g`; the stored representative is the
  // lexicographically smallest rotation.
  static DiscreteLoopClass make(const GraphModel& g, std::vector<NodeIndex> cycle);

  // Canonicalizes without validation; used by samplers that only produce
  // valid cycles.
  static DiscreteLoopClass from_valid(std::vector<NodeIndex> cycle);

  const std::vector<NodeIndex>& cycle() const { return cycle_; }
  std::size_t length() const { return cycle_.size(); }

  // Smallest d > 0 with x_{i+d} = x_i for all i; d divides length().
  std::size_t period() const;

  // Traversal counts N_{x,y} on an n-node graph.
  Matrix traversals(std::size_t n) const;

  bool visits(NodeIndex x) const;

  friend bool operator==(const DiscreteLoopClass&, const DiscreteLoopClass&) = default;
  friend auto operator<=>(const DiscreteLoopClass& a, const DiscreteLoopClass& b) {
    if (a.cycle_.size() != b.cycle_.size()) return a.cycle_.size() <=> b.cycle_.size();
    return a.cycle_ <=> b.cycle_;
  }

 private:
  explicit DiscreteLoopClass(std::vector<NodeIndex> cycle) : cycle_(std::move(cycle)) {}
  std::vector<NodeIndex> cycle_;
};

// Lexicographically smallest rotation of a cyclic sequence.
std::vector<NodeIndex> canonical_rotation(const std::vector<NodeIndex>& cycle);

/// Nontrivial loop with rescaled holding times. `visits` is a based
/// representative of the loop class and `holding[i]` is the rescaled holding
/// time of visit i.
struct MarkedLoop {
  std::vector<NodeIndex> visits;
  std::vector<double> holding;

  std::size_t length() const { return visits.size(); }
  DiscreteLoopClass loop_class() const { return DiscreteLoopClass::from_valid(visits); }

  // l^x = sum of holding times at x.
  double occupation(NodeIndex x) const;
  void add_occupation(Vector& acc) const;
  // Adds N_{x,y} counts with the convention x_{k+1} = x_1.
  void add_traversals(Matrix& acc) const;
};

/// Path of the chain: visited nodes with their holding times, ending either
/// at a node (bridges) or at the cemetery (killed paths).
struct Path {
  std::vector<NodeIndex> visits;
  std::vector<double> holding;
  NodeIndex endpoint = kCemetery;

  std::size_t jumps() const { return visits.empty() ? 0 : visits.size() - 1; }
  Vector occupation(std::size_t n) const;
};

/// Total traversal counts and total occupation of a set of loops.
struct NetworkSummary {
  Matrix traversals;
  Vector occupation;

  static NetworkSummary zero(std::size_t n) {
    return {Matrix::Zero(n, n), Vector::Zero(n)};
  }
};

}  // namespace loopsoup
