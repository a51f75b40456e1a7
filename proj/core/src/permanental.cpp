#include "loopsoup/permanental.hpp"

#include <cmath>
#include <numeric>

#include "loopsoup/errors.hpp"

namespace loopsoup {

namespace {

template <bool kNoFix>
double permanent_impl(const Matrix& a, double alpha) {
  if (a.rows() != a.cols()) throw DimensionMismatch("permanent: matrix not square");
  const auto k = static_cast<std::size_t>(a.rows());
  if (k > kPermanentMaxDim) throw ResourceLimit("permanent: dimension above the enumeration guard");
  if (k == 0) return 1.0;
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> seen(k);
  double total = 0.0;
  do {
    double prod = 1.0;
    bool skip = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (kNoFix && perm[i] == i) {
        skip = true;
        break;
      }
      prod *= a(i, perm[i]);
    }
    if (skip || prod == 0.0) continue;
    std::fill(seen.begin(), seen.end(), 0);
    int cycles = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (seen[i]) continue;
      ++cycles;
      for (std::size_t j = i; !seen[j]; j = perm[j]) seen[j] = 1;
    }
    total += std::pow(alpha, cycles) * prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace

double alpha_permanent(const Matrix& a, double alpha) { return permanent_impl<false>(a, alpha); }

double alpha_permanent_nofix(const Matrix& a, double alpha) { return permanent_impl<true>(a, alpha); }

double rising_factorial(double alpha, unsigned n) {
  double v = 1.0;
  for (unsigned i = 0; i < n; ++i) v *= alpha + i;
  return v;
}

double laguerre_eval(unsigned k, double a, double u) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + a - u;
  for (unsigned n = 2; n <= k; ++n) {
    const double next = ((2.0 * n - 1.0 + a - u) * cur - (n - 1.0 + a) * prev) / n;
    prev = cur;
    cur = next;
  }
  return cur;
}

double pk_poly(unsigned k, double alpha, double sigma, double x) {
  if (!(sigma > 0.0)) throw ValidationError("pk_poly: sigma must be positive");
  return std::pow(-sigma, static_cast<double>(k)) * laguerre_eval(k, alpha - 1.0, x / sigma);
}

double qk_poly(unsigned k, double alpha, double sigma, double u) {
  if (!(sigma > 0.0)) throw ValidationError("qk_poly: sigma must be positive");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = u;
  for (unsigned n = 2; n <= k; ++n) {
    const double next =
        ((u - 2.0 * sigma * (n - 1.0)) * cur - sigma * sigma * (alpha + n - 2.0) * prev) / n;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_eval(unsigned n, double u) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = u;
  for (unsigned k = 1; k < n; ++k) {
    const double next = u * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

Vector renormalized_power_field(const PotentialBundle& b, double alpha, const Vector& centered,
                                unsigned k) {
  if (centered.size() != static_cast<Eigen::Index>(b.size())) throw DimensionMismatch("field size");
  Vector out(centered.size());
  for (Eigen::Index x = 0; x < centered.size(); ++x) {
    out(x) = qk_poly(k, alpha, b.green(x, x), centered(x));
  }
  return out;
}

double negbinom_pmf(double alpha, double q, std::uint64_t n) {
  if (!(alpha > 0.0)) throw ValidationError("negbinom_pmf: alpha must be positive");
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("negbinom_pmf: q must lie in (0, 1]");
  if (q == 1.0) return n == 0 ? 1.0 : 0.0;
  const double nn = static_cast<double>(n);
  const double log_p = std::lgamma(alpha + nn) - std::lgamma(alpha) - std::lgamma(nn + 1.0) +
                       alpha * std::log(q) + nn * std::log1p(-q);
  return std::exp(log_p);
}

MomentPrediction moment_prediction(const PotentialBundle& b, double alpha,
                                   const std::vector<NodeIndex>& points, MomentKind kind) {
  for (auto x : points) {
    if (x >= b.size()) throw ValidationError("moment_prediction: point out of range");
  }
  const Matrix sub = submatrix(b.green(), points);
  MomentPrediction out{points, 0.0, kind};
  out.value = kind == MomentKind::Full ? alpha_permanent(sub, alpha) : alpha_permanent_nofix(sub, alpha);
  return out;
}

}  // namespace loopsoup
