#include "loopsoup/loop_soup.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "loopsoup/errors.hpp"
#include "loopsoup/loop_measure.hpp"
#include "loopsoup/stats.hpp"

namespace loopsoup {

namespace {

constexpr double kPowerTableLimit = 4e6;

// Index of the first cumulative weight exceeding u * total.
std::size_t pick(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

void attach_holding(const GraphModel& g, MarkedLoop& loop, RandomStream& rng) {
  loop.holding.resize(loop.visits.size());
  for (std::size_t i = 0; i < loop.visits.size(); ++i) {
    loop.holding[i] = rng.exponential(g.lambda()(loop.visits[i]));
  }
}

}  // namespace

Vector LoopSoup::nontrivial_occupation() const {
  Vector out = Vector::Zero(size());
  for (const auto& l : loops) l.add_occupation(out);
  return out;
}

Vector LoopSoup::occupation() const {
  Vector out = nontrivial_occupation() + trivial_occupation;
  for (const auto& t : trivial_loops) out(t.node) += t.holding;
  return out;
}

Matrix LoopSoup::traversals() const {
  Matrix out = Matrix::Zero(size(), size());
  for (const auto& l : loops) l.add_traversals(out);
  return out;
}

std::vector<std::uint64_t> LoopSoup::visit_counts() const {
  std::vector<std::uint64_t> out(size(), 0);
  for (const auto& l : loops) {
    for (auto x : l.visits) ++out[x];
  }
  return out;
}

struct SoupSampler::LengthTables {
  std::vector<Matrix> powers;            // P^0 .. P^kmax
  std::vector<double> length_cdf;        // cumulative Tr(P^k)/k, k = 2..kmax
  std::vector<std::vector<double>> base; // per k: cumulative diag(P^k)
};

struct SoupSampler::RootedTables {
  struct Root {
    double ret = 0.0;  // probability that an excursion from j returns to j inside D_j
    // Doob step tables inside D_j: for each z, (w, cumulative probability).
    std::vector<std::vector<std::pair<NodeIndex, double>>> steps;
  };
  std::vector<Root> roots;
};

SoupSampler::SoupSampler(const PotentialBundle& b, SoupOptions options)
    : bundle_(&b), options_(options), engine_(options.engine) {
  if (!(options_.alpha > 0.0) || !std::isfinite(options_.alpha)) {
    throw ValidationError("alpha must be positive and finite");
  }
  if (options_.mode == TrivialMode::Resolved && !(options_.eps > 0.0)) {
    throw ValidationError("resolved mode needs eps > 0");
  }
  const auto& g = b.model();
  const auto n = g.size();

  if (engine_ != SoupEngine::Rooted) {
    kmax_ = default_truncation(g);
    const double table = static_cast<double>(kmax_ + 1) * static_cast<double>(n * n);
    if (engine_ == SoupEngine::Auto) {
      engine_ = table <= kPowerTableLimit ? SoupEngine::LengthBridge : SoupEngine::Rooted;
    } else if (table > 1e8) {
      throw ResourceLimit("length-bridge power table too large for this graph");
    }
  }

  if (engine_ == SoupEngine::LengthBridge) {
    length_ = std::make_unique<LengthTables>();
    auto& t = *length_;
    const Matrix& p = g.transition();
    t.powers.reserve(kmax_ + 1);
    t.powers.push_back(Matrix::Identity(n, n));
    for (std::size_t k = 1; k <= kmax_; ++k) t.powers.push_back(t.powers.back() * p);
    double acc = 0.0;
    t.base.resize(kmax_ + 1);
    for (std::size_t k = 2; k <= kmax_; ++k) {
      const Vector d = t.powers[k].diagonal();
      acc += d.sum() / static_cast<double>(k);
      t.length_cdf.push_back(acc);
      auto& cb = t.base[k];
      cb.resize(n);
      double c = 0.0;
      for (std::size_t x = 0; x < n; ++x) cb[x] = (c += std::max(0.0, d(x)));
    }
    mass_ = acc;
  } else {
    rooted_ = std::make_unique<RootedTables>();
    auto& t = *rooted_;
    t.roots.resize(n);
    const Matrix m = g.energy_matrix();
    const Matrix& p = g.transition();
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t len = n - j;
      // Column j of G^{D_j}, D_j = {j, ..., n-1}.
      const Matrix block = m.bottomRightCorner(len, len);
      Eigen::LDLT<Matrix> ldlt(block);
      Vector e = Vector::Zero(len);
      e(0) = 1.0;
      const Vector col = ldlt.solve(e);
      auto& root = t.roots[j];
      const double gjj = col(0);
      root.ret = std::max(0.0, 1.0 - 1.0 / (g.lambda()(j) * gjj));
      if (root.ret <= 0.0) continue;
      mass_ += -std::log1p(-root.ret);
      root.steps.resize(len);
      for (std::size_t zi = 0; zi < len; ++zi) {
        const NodeIndex z = j + zi;
        const double hz = zi == 0 ? 1.0 : col(zi) / gjj;
        const double norm = zi == 0 ? root.ret : hz;
        auto& row = root.steps[zi];
        double c = 0.0;
        for (auto w : g.neighbors(z)) {
          if (w < j) continue;
          const double hw = col(w - j) / gjj;
          c += p(z, w) * hw / norm;
          row.emplace_back(w, c);
        }
        if (!row.empty()) {
          for (auto& [w, cum] : row) cum /= c;
        }
      }
    }
    kmax_ = 0;
  }
}

SoupSampler::~SoupSampler() = default;
SoupSampler::SoupSampler(SoupSampler&&) noexcept = default;
SoupSampler& SoupSampler::operator=(SoupSampler&&) noexcept = default;

void SoupSampler::sample_length_bridge(RandomStream& rng, std::vector<MarkedLoop>& out) const {
  const auto& g = bundle_->model();
  const auto& t = *length_;
  const auto count = rng.poisson(options_.alpha * mass_);
  for (std::uint64_t c = 0; c < count; ++c) {
    const std::size_t k = pick(t.length_cdf, rng.uniform()) + 2;
    const NodeIndex x = pick(t.base[k], rng.uniform());
    MarkedLoop loop;
    loop.visits.reserve(k);
    loop.visits.push_back(x);
    NodeIndex cur = x;
    for (std::size_t i = 1; i < k; ++i) {
      // Next point w with weight P[cur][w] * P^{k-i}[w][x].
      const Matrix& rest = t.powers[k - i];
      const auto& nb = g.neighbors(cur);
      double total = 0.0;
      for (auto w : nb) total += g.transition()(cur, w) * rest(w, x);
      const double target = rng.uniform() * total;
      double acc = 0.0;
      NodeIndex next = nb.back();
      for (auto w : nb) {
        const double wt = g.transition()(cur, w) * rest(w, x);
        if (wt <= 0.0) continue;
        acc += wt;
        next = w;
        if (acc > target) break;
      }
      loop.visits.push_back(next);
      cur = next;
    }
    attach_holding(g, loop, rng);
    out.push_back(std::move(loop));
  }
}

void SoupSampler::sample_rooted(RandomStream& rng, std::vector<MarkedLoop>& out) const {
  const auto& g = bundle_->model();
  const auto n = g.size();
  const double alpha = options_.alpha;
  std::vector<std::vector<NodeIndex>> excursions;
  std::vector<std::size_t> sigma;
  std::vector<char> seen;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& root = rooted_->roots[j];
    if (root.ret <= 0.0) continue;
    const double lam = rng.gamma(alpha) * root.ret / (1.0 - root.ret);
    const auto k = rng.poisson(lam);
    if (k == 0) continue;
    excursions.assign(k, {});
    for (auto& ex : excursions) {
      ex.push_back(j);
      std::size_t zi = 0;
      for (;;) {
        const auto& row = root.steps[zi];
        const double u = rng.uniform();
        auto it = std::upper_bound(row.begin(), row.end(), u,
                                   [](double v, const auto& e) { return v < e.second; });
        if (it == row.end()) --it;
        const NodeIndex w = it->first;
        if (w == j) break;
        ex.push_back(w);
        zi = w - j;
      }
    }
    // Chinese restaurant permutation with parameter alpha.
    sigma.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
      if (i == 0 || rng.uniform() < alpha / (alpha + static_cast<double>(i))) {
        sigma[i] = i;
      } else {
        const auto m = static_cast<std::size_t>(rng.below(i));
        sigma[i] = sigma[m];
        sigma[m] = i;
      }
    }
    seen.assign(k, 0);
    for (std::size_t s = 0; s < k; ++s) {
      if (seen[s]) continue;
      MarkedLoop loop;
      for (std::size_t i = s; !seen[i]; i = sigma[i]) {
        seen[i] = 1;
        loop.visits.insert(loop.visits.end(), excursions[i].begin(), excursions[i].end());
      }
      attach_holding(g, loop, rng);
      out.push_back(std::move(loop));
    }
  }
}

void SoupSampler::sample_nontrivial(RandomStream& rng, std::vector<MarkedLoop>& out) const {
  if (engine_ == SoupEngine::LengthBridge) {
    sample_length_bridge(rng, out);
  } else {
    sample_rooted(rng, out);
  }
}

void SoupSampler::add_trivial(RandomStream& rng, LoopSoup& soup) const {
  const auto& lam = bundle_->model().lambda();
  const auto n = bundle_->size();
  soup.trivial_occupation = Vector::Zero(n);
  for (std::size_t x = 0; x < n; ++x) {
    double total = rng.gamma(options_.alpha) / lam(x);
    if (options_.mode == TrivialMode::Resolved) {
      // GEM(alpha) stick-breaking of the gamma total gives the jumps of the
      // one-point loop process in size-biased order.
      while (total > options_.eps) {
        const double v = 1.0 - std::pow(rng.uniform(), 1.0 / options_.alpha);
        const double jump = total * v;
        if (jump > options_.eps) {
          soup.trivial_loops.push_back({x, jump});
          total -= jump;
        } else {
          total -= jump;
          soup.trivial_occupation(x) += jump;
        }
      }
    }
    soup.trivial_occupation(x) += total;
  }
}

LoopSoup SoupSampler::sample(RandomStream& rng) const {
  LoopSoup soup;
  soup.alpha = options_.alpha;
  soup.mode = options_.mode;
  soup.eps = options_.eps;
  sample_nontrivial(rng, soup.loops);
  add_trivial(rng, soup);
  return soup;
}

LoopSoup sample_soup(const PotentialBundle& b, const SoupOptions& options, RandomStream& rng) {
  return SoupSampler(b, options).sample(rng);
}

Vector centered_occupation(const LoopSoup& soup, const PotentialBundle& b) {
  return soup.occupation() - soup.alpha * b.green().diagonal();
}

double expected_resolved_trivial(const PotentialBundle& b, double alpha, NodeIndex x, double eps) {
  return alpha * expint_e1(b.model().lambda()(x) * eps);
}

double soup_log_density(const PotentialBundle& b, double alpha,
                        const std::vector<DiscreteLoopClass>& classes) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  double v = -alpha * nontrivial_mass(b);
  std::map<DiscreteLoopClass, std::size_t> mult;
  for (const auto& c : classes) {
    v += std::log(alpha * class_mass(b, c));
    ++mult[c];
  }
  for (const auto& [c, m] : mult) v -= std::lgamma(static_cast<double>(m) + 1.0);
  return v;
}

double current_sum(const MarkedLoop& loop, const Current& omega) {
  const auto k = loop.visits.size();
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += omega(loop.visits[i], loop.visits[(i + 1) % k]);
  return s;
}

double current_sum(const LoopSoup& soup, const Current& omega) {
  double s = 0.0;
  for (const auto& l : soup.loops) s += current_sum(l, omega);
  return s;
}

double loop_multiple_local_time(const MarkedLoop& loop, const std::vector<NodeIndex>& points) {
  const auto n = points.size();
  if (n == 0) throw ValidationError("loop_multiple_local_time: no points");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (points[i] == points[j]) throw ValidationError("loop_multiple_local_time: points must be distinct");
    }
  }
  const auto p = loop.visits.size();
  double total = 0.0;
  std::vector<double> dp(n + 1);
  for (std::size_t shift = 0; shift < n; ++shift) {
    // dp[m] = weighted count of matches of the first m shifted points.
    std::fill(dp.begin(), dp.end(), 0.0);
    dp[0] = 1.0;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t m = n; m >= 1; --m) {
        if (loop.visits[i] == points[(m - 1 + shift) % n]) dp[m] += dp[m - 1] * loop.holding[i];
      }
    }
    total += dp[n];
  }
  return total;
}

BridgeSampler::BridgeSampler(const PotentialBundle& b, NodeIndex target) : bundle_(&b), target_(target) {
  const auto& g = b.model();
  const auto n = g.size();
  if (target >= n) throw ValidationError("bridge target out of range");
  const double gyy = b.green(target, target);
  return_stop_ = 1.0 / (g.lambda()(target) * gyy);
  cumulative_.resize(n);
  for (std::size_t z = 0; z < n; ++z) {
    const double hz = b.green(z, target) / gyy;
    auto& row = cumulative_[z];
    double c = 0.0;
    for (auto w : g.neighbors(z)) {
      c += g.transition()(z, w) * b.green(w, target) / gyy / hz;
      row.emplace_back(w, c);
    }
    if (!row.empty()) {
      for (auto& [w, cum] : row) cum /= c;
    }
  }
}

NodeIndex BridgeSampler::step(NodeIndex z, RandomStream& rng) const {
  const auto& row = cumulative_[z];
  const double u = rng.uniform();
  auto it = std::upper_bound(row.begin(), row.end(), u,
                             [](double v, const auto& e) { return v < e.second; });
  if (it == row.end()) --it;
  return it->first;
}

Path BridgeSampler::sample(NodeIndex from, RandomStream& rng) const {
  const auto& g = bundle_->model();
  if (from >= g.size()) throw ValidationError("bridge start out of range");
  Path path;
  path.endpoint = target_;
  NodeIndex cur = from;
  path.visits.push_back(cur);
  while (cur != target_) {
    cur = step(cur, rng);
    path.visits.push_back(cur);
  }
  const auto returns = rng.geometric(return_stop_);
  for (std::uint64_t r = 0; r < returns; ++r) {
    do {
      cur = step(cur, rng);
      path.visits.push_back(cur);
    } while (cur != target_);
  }
  path.holding.resize(path.visits.size());
  for (std::size_t i = 0; i < path.visits.size(); ++i) {
    path.holding[i] = rng.exponential(g.lambda()(path.visits[i]));
  }
  return path;
}

Path sample_bridge(const PotentialBundle& b, NodeIndex x, NodeIndex y, RandomStream& rng) {
  return BridgeSampler(b, y).sample(x, rng);
}

Path sample_killed_path(const PotentialBundle& b, NodeIndex x, RandomStream& rng,
                        std::uint64_t max_steps) {
  const auto& g = b.model();
  if (x >= g.size()) throw ValidationError("start node out of range");
  Path path;
  path.endpoint = kCemetery;
  NodeIndex cur = x;
  for (std::uint64_t s = 0;; ++s) {
    if (s >= max_steps) throw ConvergenceFailure("killed path exceeded the step guard");
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
    cur = next;
  }
  return path;
}

}  // namespace loopsoup
