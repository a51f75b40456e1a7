#include "loopsoup/gff.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "loopsoup/errors.hpp"
#include "loopsoup/permanental.hpp"

namespace loopsoup {

Vector FieldSample::half_square_sum() const {
  Vector out = Vector::Zero(sigma.size());
  for (const auto& c : copies) out += 0.5 * c.cwiseAbs2();
  return out;
}

FieldSampler::FieldSampler(const PotentialBundle& b) : sigma_(b.green().diagonal()) {
  const Matrix& g = b.green();
  const double scale = g.cwiseAbs().maxCoeff();
  Eigen::LLT<Matrix> llt(g);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Matrix l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows() && ok; ++i) ok = l(i, i) * l(i, i) > 1e-12 * scale;
    if (ok) factor_ = l;
  }
  if (!ok) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    if (es.info() != Eigen::Success) throw SingularMatrix("field covariance factorization failed");
    const Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = es.eigenvectors() * ev.asDiagonal();
  }
}

Vector FieldSampler::sample(RandomStream& rng) const {
  Vector z(factor_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return factor_ * z;
}

FieldSample FieldSampler::sample(std::size_t k, RandomStream& rng) const {
  if (k == 0) throw ValidationError("gff_sample: k must be at least 1");
  FieldSample out;
  out.sigma = sigma_;
  out.copies.reserve(k);
  for (std::size_t j = 0; j < k; ++j) out.copies.push_back(sample(rng));
  return out;
}

FieldSample gff_sample(const PotentialBundle& b, std::size_t k, RandomStream& rng) {
  return FieldSampler(b).sample(k, rng);
}

double wick_power(double value, double sigma, unsigned n) {
  if (!(sigma > 0.0)) throw ValidationError("wick_power: sigma must be positive");
  const double s = std::sqrt(sigma);
  return std::pow(s, static_cast<double>(n)) * hermite_eval(n, value / s);
}

double wick_sum_square_power(std::span<const double> values, double sigma, unsigned n) {
  if (values.empty()) throw ValidationError("wick_sum_square_power: no copies");
  double sq = 0.0;
  for (double v : values) sq += v * v;
  return pk_poly(n, 0.5 * static_cast<double>(values.size()), sigma, 0.5 * sq);
}

namespace {

// Sum over n_j >= 0 with sum n_j = left of prod_{j >= idx} :phi_j^{2 n_j}: / n_j!.
double compositions(std::span<const double> values, double sigma, std::size_t idx, unsigned left) {
  if (idx + 1 == values.size()) {
    return wick_power(values[idx], sigma, 2 * left) / std::tgamma(left + 1.0);
  }
  double s = 0.0;
  for (unsigned m = 0; m <= left; ++m) {
    s += wick_power(values[idx], sigma, 2 * m) / std::tgamma(m + 1.0) *
         compositions(values, sigma, idx + 1, left - m);
  }
  return s;
}

}  // namespace

double wick_sum_square_power_multinomial(std::span<const double> values, double sigma, unsigned n) {
  if (values.empty()) throw ValidationError("wick_sum_square_power: no copies");
  return compositions(values, sigma, 0, n) / std::pow(2.0, n);
}

}  // namespace loopsoup
