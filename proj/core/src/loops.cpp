#include "loopsoup/loops.hpp"

#include <algorithm>

#include "loopsoup/errors.hpp"

namespace loopsoup {

std::vector<NodeIndex> canonical_rotation(const std::vector<NodeIndex>& cycle) {
  const auto k = cycle.size();
  if (k == 0) return {};
  std::size_t best = 0;
  for (std::size_t s = 1; s < k; ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto a = cycle[(s + i) % k];
      const auto b = cycle[(best + i) % k];
      if (a != b) {
        if (a < b) best = s;
        break;
      }
    }
  }
  std::vector<NodeIndex> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = cycle[(best + i) % k];
  return out;
}

DiscreteLoopClass DiscreteLoopClass::make(const GraphModel& g, std::vector<NodeIndex> cycle) {
  const auto k = cycle.size();
  if (k < 2) throw ValidationError("a nontrivial discrete loop needs at least two points");
  for (std::size_t i = 0; i < k; ++i) {
    const auto x = cycle[i];
    const auto y = cycle[(i + 1) % k];
    if (x >= g.size() || y >= g.size()) throw ValidationError("loop node out of range");
    if (!g.has_edge(x, y)) {
      throw ValidationError("loop uses a non-edge ('" + g.name(x) + "','" + g.name(y) + "')");
    }
  }
  return DiscreteLoopClass(canonical_rotation(cycle));
}

DiscreteLoopClass DiscreteLoopClass::from_valid(std::vector<NodeIndex> cycle) {
  return DiscreteLoopClass(canonical_rotation(cycle));
}

std::size_t DiscreteLoopClass::period() const {
  const auto k = cycle_.size();
  for (std::size_t d = 1; d < k; ++d) {
    if (k % d != 0) continue;
    bool ok = true;
    for (std::size_t i = 0; i + d < k && ok; ++i) ok = cycle_[i] == cycle_[i + d];
    if (ok) return d;
  }
  return k;
}

Matrix DiscreteLoopClass::traversals(std::size_t n) const {
  Matrix out = Matrix::Zero(n, n);
  const auto k = cycle_.size();
  for (std::size_t i = 0; i < k; ++i) out(cycle_[i], cycle_[(i + 1) % k]) += 1.0;
  return out;
}

bool DiscreteLoopClass::visits(NodeIndex x) const {
  return std::find(cycle_.begin(), cycle_.end(), x) != cycle_.end();
}

double MarkedLoop::occupation(NodeIndex x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < visits.size(); ++i) {
    if (visits[i] == x) s += holding[i];
  }
  return s;
}

void MarkedLoop::add_occupation(Vector& acc) const {
  for (std::size_t i = 0; i < visits.size(); ++i) acc(visits[i]) += holding[i];
}

void MarkedLoop::add_traversals(Matrix& acc) const {
  const auto k = visits.size();
  for (std::size_t i = 0; i < k; ++i) acc(visits[i], visits[(i + 1) % k]) += 1.0;
}

Vector Path::occupation(std::size_t n) const {
  Vector out = Vector::Zero(n);
  for (std::size_t i = 0; i < visits.size(); ++i) out(visits[i]) += holding[i];
  return out;
}

}  // namespace loopsoup
