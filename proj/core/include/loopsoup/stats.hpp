#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "loopsoup/random.hpp"

namespace loopsoup {

/// Streaming mean/variance (Welford), mergeable with Chan's update so that
/// block results can be combined in a fixed order.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStats& o);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  // n * mean, exact for 0/1 indicators.
  double sum() const { return mean_ * static_cast<double>(n_); }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Replicas are grouped in blocks of this size; each block is accumulated
// sequentially and blocks are merged in index order.
inline constexpr std::uint64_t kReplicaBlock = 4096;

// Worker count used when `threads` is 0.
unsigned default_threads();

/// Runs `n` replicas of `f(RandomStream&, std::span<double> out)`, each
/// writing `dim` observables, and returns per-observable statistics.
/// Replica i draws from RandomStream(seed, mix64(tag) ^ i)-derived streams,
/// so the result is identical for any thread count.
template <class F>
std::vector<RunningStats> run_replicas(std::uint64_t seed, std::uint64_t tag, std::uint64_t n,
                                       std::size_t dim, F&& f, unsigned threads = 0) {
  const std::uint64_t blocks = (n + kReplicaBlock - 1) / kReplicaBlock;
  std::vector<std::vector<RunningStats>> partial(blocks, std::vector<RunningStats>(dim));
  const RandomStream root(seed, mix64(tag));
  auto work = [&](std::uint64_t first_block, std::uint64_t stride) {
    std::vector<double> out(dim);
    for (std::uint64_t blk = first_block; blk < blocks; blk += stride) {
      const std::uint64_t lo = blk * kReplicaBlock;
      const std::uint64_t hi = std::min(n, lo + kReplicaBlock);
      for (std::uint64_t i = lo; i < hi; ++i) {
        RandomStream rng = root.substream(i);
        std::fill(out.begin(), out.end(), 0.0);
        f(rng, std::span<double>(out));
        for (std::size_t d = 0; d < dim; ++d) partial[blk][d].add(out[d]);
      }
    }
  };
  const unsigned t = std::max<unsigned>(
      1, static_cast<unsigned>(std::min<std::uint64_t>(threads ? threads : default_threads(), blocks)));
  if (t <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < t; ++w) pool.emplace_back(work, w, t);
    for (auto& th : pool) th.join();
  }
  std::vector<RunningStats> total(dim);
  for (const auto& p : partial) {
    for (std::size_t d = 0; d < dim; ++d) total[d].merge(p[d]);
  }
  return total;
}

struct GofResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
};

// Pearson chi-square of observed counts against expected probabilities
// (which must sum to 1 over the bins; the last bin is typically a tail).
GofResult chi_square_gof(std::span<const double> observed, std::span<const double> probabilities);

// Chi-square homogeneity test between two count vectors over the same bins.
GofResult chi_square_two_sample(std::span<const double> a, std::span<const double> b);

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
GofResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Critical value of the two-sample KS statistic at level 0.001.
double ks_critical_001(std::size_t n, std::size_t m);

// Riemann zeta function.
double zeta(double s);

// Exponential integral E1(x), x > 0.
double expint_e1(double x);

}  // namespace loopsoup
