#include "loopsoup/erasure_wilson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loopsoup/errors.hpp"

namespace loopsoup {

ErasureResult loop_erase(const Path& path) {
  if (path.visits.size() != path.holding.size()) throw ValidationError("loop_erase: holding size mismatch");
  if (path.visits.empty()) throw ValidationError("loop_erase: empty path");
  ErasureResult r;
  r.endpoint = path.endpoint;
  std::vector<std::size_t> position;  // position[x] = stack index + 1, 0 if absent
  for (std::size_t i = 0; i < path.visits.size(); ++i) {
    const NodeIndex x = path.visits[i];
    if (x == kCemetery) throw ValidationError("loop_erase: cemetery inside a path");
    if (x >= position.size()) position.resize(x + 1, 0);
    if (position[x] != 0) {
      const std::size_t j = position[x] - 1;
      ErasedLoop e;
      for (std::size_t s = j; s < r.skeleton.size(); ++s) {
        e.loop.visits.push_back(r.skeleton[s]);
        e.loop.holding.push_back(r.skeleton_holding[s]);
        e.source.push_back(r.skeleton_source[s]);
        position[r.skeleton[s]] = 0;
      }
      r.skeleton.resize(j);
      r.skeleton_holding.resize(j);
      r.skeleton_source.resize(j);
      r.erased.push_back(std::move(e));
    }
    r.skeleton.push_back(x);
    r.skeleton_holding.push_back(path.holding[i]);
    r.skeleton_source.push_back(i);
    position[x] = r.skeleton.size();
  }
  if (path.endpoint != kCemetery && r.skeleton.back() != path.endpoint) {
    throw ValidationError("loop_erase: bridge does not end at its endpoint");
  }
  return r;
}

std::vector<NodeIndex> replay(const ErasureResult& r) {
  std::vector<std::pair<std::size_t, NodeIndex>> all;
  for (std::size_t i = 0; i < r.skeleton.size(); ++i) all.emplace_back(r.skeleton_source[i], r.skeleton[i]);
  for (const auto& e : r.erased) {
    for (std::size_t i = 0; i < e.source.size(); ++i) all.emplace_back(e.source[i], e.loop.visits[i]);
  }
  std::sort(all.begin(), all.end());
  std::vector<NodeIndex> out;
  out.reserve(all.size());
  for (const auto& [idx, x] : all) out.push_back(x);
  return out;
}

double be_exact_law(const PotentialBundle& b, NodeIndex x, NodeIndex target,
                    const std::vector<NodeIndex>& eta) {
  const auto& g = b.model();
  const auto n = g.size();
  if (eta.empty() || eta.front() != x) throw ValidationError("be_exact_law: path must start at x");
  if (target != kCemetery && eta.back() != target) throw ValidationError("be_exact_law: path must end at the target");
  std::vector<char> seen(n, 0);
  for (auto v : eta) {
    if (v >= n) throw ValidationError("be_exact_law: node out of range");
    if (seen[v]) throw ValidationError("be_exact_law: path is not self-avoiding");
    seen[v] = 1;
  }
  double w = 1.0;
  for (std::size_t i = 0; i + 1 < eta.size(); ++i) w *= g.conductance(eta[i], eta[i + 1]);
  if (target == kCemetery) w *= g.killing()(eta.back());
  if (w == 0.0) return 0.0;
  return w * log_det_spd(submatrix(b.green(), eta)).value();
}

void check_tree(const GraphModel& g, const SpanningTree& t) {
  const auto n = g.size();
  if (t.parent.size() != n) throw ValidationError("tree: wrong number of nodes");
  for (std::size_t x = 0; x < n; ++x) {
    const auto p = t.parent[x];
    if (p == kCemetery) {
      if (!(g.killing()(x) > 0.0)) throw ValidationError("tree: link to the cemetery without killing");
    } else if (p >= n || !g.has_edge(x, p)) {
      throw ValidationError("tree: link is not an edge");
    }
  }
  // every node must reach the cemetery within n steps
  for (std::size_t x = 0; x < n; ++x) {
    NodeIndex cur = x;
    std::size_t steps = 0;
    while (cur != kCemetery && steps <= n) {
      cur = t.parent[cur];
      ++steps;
    }
    if (cur != kCemetery) throw ValidationError("tree: cycle");
  }
}

double tree_weight(const PotentialBundle& b, const SpanningTree& t) {
  const auto& g = b.model();
  check_tree(g, t);
  double log_w = b.log_z_e();
  for (std::size_t x = 0; x < g.size(); ++x) {
    const auto p = t.parent[x];
    log_w += std::log(p == kCemetery ? g.killing()(x) : g.conductance(x, p));
  }
  return std::exp(log_w);
}

std::vector<WeightedTree> enumerate_spanning_trees(const PotentialBundle& b) {
  const auto& g = b.model();
  const auto n = g.size();
  if (n > 8) throw ResourceLimit("enumerate_spanning_trees: more than 8 nodes");
  std::vector<std::vector<NodeIndex>> choices(n);
  for (std::size_t x = 0; x < n; ++x) {
    choices[x] = g.neighbors(x);
    if (g.killing()(x) > 0.0) choices[x].push_back(kCemetery);
  }
  std::vector<std::size_t> idx(n, 0);
  std::vector<WeightedTree> out;
  SpanningTree t;
  t.parent.resize(n);
  for (;;) {
    for (std::size_t x = 0; x < n; ++x) t.parent[x] = choices[x][idx[x]];
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) {
      NodeIndex cur = x;
      std::size_t steps = 0;
      while (cur != kCemetery && steps <= n) {
        cur = t.parent[cur];
        ++steps;
      }
      ok = cur == kCemetery;
    }
    if (ok) out.push_back({t, tree_weight(b, t)});
    std::size_t x = 0;
    while (x < n && ++idx[x] == choices[x].size()) idx[x++] = 0;
    if (x == n) break;
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& c) { return a.tree < c.tree; });
  return out;
}

WilsonResult wilson_sample(const PotentialBundle& b, RandomStream& rng, const std::vector<NodeIndex>& order_in,
                           std::uint64_t max_steps) {
  const auto& g = b.model();
  const auto n = g.size();
  std::vector<NodeIndex> order = order_in;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<NodeIndex> all(n);
    std::iota(all.begin(), all.end(), 0);
    if (sorted != all) throw ValidationError("wilson_sample: order must be a permutation of the nodes");
  }
  WilsonResult r;
  r.tree.parent.assign(n, kCemetery);
  r.occupation = Vector::Zero(n);
  std::vector<char> in_tree(n, 0);
  std::uint64_t steps = 0;
  Path path;
  for (auto start : order) {
    if (in_tree[start]) continue;
    path.visits.clear();
    path.holding.clear();
    NodeIndex cur = start;
    NodeIndex hit = kCemetery;
    for (;;) {
      if (++steps > max_steps) throw ConvergenceFailure("wilson_sample: step guard exceeded");
      path.visits.push_back(cur);
      path.holding.push_back(rng.exponential(g.lambda()(cur)));
      double u = rng.uniform() * g.lambda()(cur);
      if (u < g.killing()(cur)) break;
      u -= g.killing()(cur);
      NodeIndex next = g.neighbors(cur).back();
      for (auto w : g.neighbors(cur)) {
        const double c = g.conductance(cur, w);
        if (u < c) {
          next = w;
          break;
        }
        u -= c;
      }
      if (in_tree[next]) {
        hit = next;
        break;
      }
      cur = next;
    }
    path.endpoint = kCemetery;
    auto er = loop_erase(path);
    for (std::size_t i = 0; i < er.skeleton.size(); ++i) {
      const auto x = er.skeleton[i];
      r.tree.parent[x] = i + 1 < er.skeleton.size() ? er.skeleton[i + 1] : hit;
      in_tree[x] = 1;
      r.occupation(x) += er.skeleton_holding[i];
    }
    for (auto& e : er.erased) {
      e.loop.add_occupation(r.occupation);
      r.erased.push_back(std::move(e.loop));
    }
  }
  return r;
}

NetworkSummary network_summary(const std::vector<MarkedLoop>& loops, std::size_t n) {
  auto s = NetworkSummary::zero(n);
  for (const auto& l : loops) {
    l.add_traversals(s.traversals);
    l.add_occupation(s.occupation);
  }
  return s;
}

}  // namespace loopsoup
