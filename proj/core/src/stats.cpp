#include "loopsoup/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "loopsoup/errors.hpp"

namespace loopsoup {

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n1 = static_cast<double>(n_);
  const double n2 = static_cast<double>(o.n_);
  const double delta = o.mean_ - mean_;
  const double n = n1 + n2;
  mean_ += delta * n2 / n;
  m2_ += o.m2_ + delta * delta * n1 * n2 / n;
  n_ += o.n_;
}

unsigned default_threads() {
  const unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : h;
}

namespace {

double chi_square_sf(double x, std::size_t dof) {
  if (dof == 0) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, x));
}

}  // namespace

GofResult chi_square_gof(std::span<const double> observed, std::span<const double> probabilities) {
  if (observed.size() != probabilities.size() || observed.size() < 2) {
    throw DimensionMismatch("chi_square_gof: bin count mismatch");
  }
  double total = 0.0;
  for (double o : observed) total += o;
  GofResult r;
  std::size_t used = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * probabilities[i];
    if (e <= 0.0) {
      if (observed[i] > 0.0) {
        r.statistic = HUGE_VAL;
        r.p_value = 0.0;
        return r;
      }
      continue;
    }
    r.statistic += (observed[i] - e) * (observed[i] - e) / e;
    ++used;
  }
  r.dof = used > 0 ? used - 1 : 0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

GofResult chi_square_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw DimensionMismatch("chi_square_two_sample: bins");
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
  }
  GofResult r;
  std::size_t used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double row = a[i] + b[i];
    if (row == 0.0) continue;
    const double ea = row * na / (na + nb);
    const double eb = row * nb / (na + nb);
    r.statistic += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    ++used;
  }
  r.dof = used > 0 ? used - 1 : 0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

GofResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ValidationError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  GofResult r;
  r.statistic = d;
  // Kolmogorov distribution tail with the Stephens small-sample correction.
  const double en = std::sqrt(n * m / (n + m));
  const double t = (en + 0.12 + 0.11 / en) * d;
  double p = 0.0;
  if (t < 0.2) {
    p = 1.0;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
      p += term;
      if (std::abs(term) < 1e-16) break;
    }
    p = std::clamp(p, 0.0, 1.0);
  }
  r.p_value = p;
  return r;
}

double ks_critical_001(std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return 1.94947 * std::sqrt((nn + mm) / (nn * mm));
}

double zeta(double s) { return boost::math::zeta(s); }

double expint_e1(double x) {
  if (!(x > 0.0)) throw ValidationError("expint_e1: argument must be positive");
  return boost::math::expint(1, x);
}

}  // namespace loopsoup
