#pragma once

// Independent reference implementations for the tests. Nothing here calls
// into the library's linear algebra or enumeration code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t n) { return Dense(n, std::vector<double>(n, 0.0)); }

// Determinant by Gaussian elimination with partial pivoting.
inline double det(Dense a) {
  const std::size_t n = a.size();
  double d = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return d;
}

// Inverse by Gauss-Jordan.
inline Dense inverse(Dense a) {
  const std::size_t n = a.size();
  Dense inv = zeros(n);
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    const double p = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= p;
      inv[c][k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

inline Dense submatrix(const Dense& a, const std::vector<std::size_t>& idx) {
  Dense s = zeros(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) s[i][j] = a[idx[i]][idx[j]];
  }
  return s;
}

// Sum over permutations of alpha^{cycles} prod a[i][sigma(i)], optionally
// skipping permutations with a fixed point.
inline double permanent(const Dense& a, double alpha, bool no_fixed = false) {
  const std::size_t n = a.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  double total = 0.0;
  do {
    bool fixed = false;
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      fixed |= p[i] == i;
      prod *= a[i][p[i]];
    }
    if (no_fixed && fixed) continue;
    std::vector<char> seen(n, 0);
    int cycles = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[i]) continue;
      ++cycles;
      for (std::size_t j = i; !seen[j]; j = p[j]) seen[j] = 1;
    }
    total += std::pow(alpha, cycles) * prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

// Green function (M_lambda - C)^{-1} from conductances and killing.
inline Dense green(const Dense& c, const std::vector<double>& kappa) {
  const std::size_t n = c.size();
  Dense m = zeros(n);
  for (std::size_t x = 0; x < n; ++x) {
    double lam = kappa[x];
    for (std::size_t y = 0; y < n; ++y) lam += c[x][y];
    m[x][x] = lam;
    for (std::size_t y = 0; y < n; ++y) {
      if (y != x) m[x][y] = -c[x][y];
    }
  }
  return inverse(m);
}

// Sum over all parent maps (parent in neighbors or the cemetery, encoded n)
// that reach the cemetery, of prod C (kappa for cemetery links). Also
// reports the number of such trees.
inline double tree_weight_sum(const Dense& c, const std::vector<double>& kappa, std::size_t* count = nullptr) {
  const std::size_t n = c.size();
  std::vector<std::size_t> parent(n, 0);
  double total = 0.0;
  std::size_t trees = 0;
  std::function<void(std::size_t, double)> rec = [&](std::size_t x, double w) {
    if (x == n) {
      for (std::size_t s = 0; s < n; ++s) {
        std::size_t v = s;
        for (std::size_t step = 0; step <= n && v != n; ++step) v = parent[v];
        if (v != n) return;
      }
      total += w;
      ++trees;
      return;
    }
    if (kappa[x] > 0.0) {
      parent[x] = n;
      rec(x + 1, w * kappa[x]);
    }
    for (std::size_t y = 0; y < n; ++y) {
      if (y != x && c[x][y] > 0.0) {
        parent[x] = y;
        rec(x + 1, w * c[x][y]);
      }
    }
  };
  rec(0, 1.0);
  if (count) *count = trees;
  return total;
}

// sum over based closed walks (x_0, ..., x_{k-1}) of prod P / k.
inline double closed_walk_mass(const Dense& p, std::size_t k) {
  const std::size_t n = p.size();
  double total = 0.0;
  std::function<void(std::size_t, std::size_t, std::size_t, double)> rec = [&](std::size_t start, std::size_t cur,
                                                                               std::size_t len, double w) {
    if (len == k) {
      total += w * p[cur][start];
      return;
    }
    for (std::size_t y = 0; y < n; ++y) {
      if (p[cur][y] > 0.0) rec(start, y, len + 1, w * p[cur][y]);
    }
  };
  for (std::size_t s = 0; s < n; ++s) rec(s, s, 1, 1.0);
  return total / static_cast<double>(k);
}

inline double rising(double a, unsigned n) {
  double r = 1.0;
  for (unsigned i = 0; i < n; ++i) r *= a + i;
  return r;
}

inline double factorial(unsigned n) { return rising(1.0, n); }

}  // namespace oracle
