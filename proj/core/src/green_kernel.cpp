#include "loopsoup/green_kernel.hpp"

#include <cmath>

#include "loopsoup/errors.hpp"

namespace loopsoup {

double LogDet::value() const { return sign * std::exp(log_abs); }

LogDet log_det_spd(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("log_det_spd: matrix not square");
  if (a.rows() == 0) return {};
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw SingularMatrix("LDLT factorization failed");
  const auto d = ldlt.vectorD();
  LogDet out;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) throw SingularMatrix("nonpositive pivot in LDLT factorization");
    out.log_abs += std::log(d(i));
  }
  return out;
}

LogDet log_det(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("log_det: matrix not square");
  if (a.rows() == 0) return {};
  Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& u = lu.matrixLU();
  LogDet out;
  out.sign = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double v = u(i, i);
    if (v == 0.0) throw SingularMatrix("singular matrix in LU factorization");
    if (v < 0.0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(v));
  }
  return out;
}

Matrix submatrix(const Matrix& a, const NodeSet& rows) { return submatrix(a, rows, rows); }

Matrix submatrix(const Matrix& a, const NodeSet& rows, const NodeSet& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  }
  return out;
}

PotentialBundle::PotentialBundle(GraphModel g) : model_(std::move(g)) {
  const Matrix m = model_.energy_matrix();
  factor_.compute(m);
  if (factor_.info() != Eigen::Success) throw SingularMatrix("energy matrix factorization failed");
  const auto d = factor_.vectorD();
  double log_det_m = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) throw SingularMatrix("energy matrix is not positive definite");
    log_det_m += std::log(d(i));
  }
  const auto n = static_cast<Eigen::Index>(model_.size());
  green_ = factor_.solve(Matrix::Identity(n, n));
  green_ = (0.5 * (green_ + green_.transpose())).eval();
  potential_ = green_ * model_.lambda().asDiagonal();
  log_z_e_ = -log_det_m;
  log_det_i_minus_p_ = log_det_m - model_.lambda().array().log().sum();
}

Matrix PotentialBundle::solve(const Matrix& rhs) const {
  if (rhs.rows() != static_cast<Eigen::Index>(size())) throw DimensionMismatch("solve: rhs rows");
  return factor_.solve(rhs);
}

Matrix green_chi(const PotentialBundle& b, const Vector& chi) {
  const auto n = static_cast<Eigen::Index>(b.size());
  if (chi.size() != n) throw DimensionMismatch("green_chi: chi size");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(chi(i) >= 0.0) || !std::isfinite(chi(i))) {
      throw ValidationError("green_chi: chi must be finite and nonnegative");
    }
  }
  Matrix m = b.model().energy_matrix();
  m.diagonal() += chi;
  Eigen::LDLT<Matrix> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw SingularMatrix("green_chi: factorization failed");
  Matrix out = ldlt.solve(Matrix::Identity(n, n));
  return 0.5 * (out + out.transpose());
}

namespace {

// Inverse of (M_lambda - C)|_{D x D} in D-local coordinates.
Matrix local_restricted_green(const GraphModel& g, const NodeSet& d) {
  const Matrix m = submatrix(g.energy_matrix(), d);
  Eigen::LDLT<Matrix> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw SingularMatrix("restricted green: factorization failed");
  Matrix out = ldlt.solve(Matrix::Identity(m.rows(), m.cols()));
  return 0.5 * (out + out.transpose());
}

}  // namespace

Matrix hitting_matrix(const PotentialBundle& b, const NodeSet& f_in) {
  const auto n = b.size();
  const auto f = normalize_set(f_in, n);
  if (f.empty()) throw ValidationError("hitting_matrix: F must be nonempty");
  const auto d = complement(f, n);
  Matrix h = Matrix::Zero(n, f.size());
  for (std::size_t j = 0; j < f.size(); ++j) h(f[j], j) = 1.0;
  if (d.empty()) return h;
  // [H^F]^x_y = sum_{b in D} [G^D]^{x,b} C_{b,y} for x in D.
  const Matrix gd = local_restricted_green(b.model(), d);
  const Matrix c_df = submatrix(b.model().conductance(), d, f);
  const Matrix hd = gd * c_df;
  for (std::size_t i = 0; i < d.size(); ++i) h.row(d[i]) = hd.row(i);
  return h;
}

Matrix restricted_green(const PotentialBundle& b, const NodeSet& d_in) {
  const auto n = b.size();
  const auto d = normalize_set(d_in, n);
  Matrix out = Matrix::Zero(n, n);
  if (d.empty()) return out;
  if (d.size() == n) return b.green();
  const Matrix gd = local_restricted_green(b.model(), d);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) out(d[i], d[j]) = gd(i, j);
  }
  return out;
}

LogDet restricted_log_det(const PotentialBundle& b, const NodeSet& d_in) {
  const auto d = normalize_set(d_in, b.size());
  if (d.empty()) return {};
  LogDet m = log_det_spd(submatrix(b.model().energy_matrix(), d));
  m.log_abs = -m.log_abs;
  return m;
}

TraceModel trace_model(const PotentialBundle& b, const NodeSet& f_in) {
  const auto& g = b.model();
  const auto n = g.size();
  const auto f = normalize_set(f_in, n);
  if (f.empty() || f.size() == n) throw ValidationError("trace_model: F must be a proper nonempty subset");
  const auto d = complement(f, n);

  const Matrix gd = local_restricted_green(g, d);
  const Matrix c_fd = submatrix(g.conductance(), f, d);
  // Excursion correction sum_{a,b in D} C_{x,a} G^D_{a,b} C_{b,y}.
  const Matrix corr = c_fd * gd * c_fd.transpose();

  const auto m = f.size();
  Matrix cf = submatrix(g.conductance(), f) + corr;
  Vector lam(m);
  for (std::size_t i = 0; i < m; ++i) {
    lam(i) = g.lambda()(f[i]) - corr(i, i);
    cf(i, i) = 0.0;
  }
  cf = (0.5 * (cf + cf.transpose())).eval();
  Vector kappa = lam - cf.rowwise().sum();
  for (std::size_t i = 0; i < m; ++i) {
    // The traced chain loses mass exactly where the base chain can be killed
    // (at x or during an excursion); clamp round-off below zero.
    if (kappa(i) < 0.0) kappa(i) = 0.0;
  }

  std::vector<std::string> names;
  for (auto x : f) names.push_back(g.name(x));
  Vector p(m);
  for (std::size_t i = 0; i < m; ++i) p(i) = corr(i, i) / g.lambda()(f[i]);

  return TraceModel{f, GraphModel::from_matrices(std::move(names), std::move(cf), std::move(kappa)),
                    std::move(p)};
}

TwistedGreen twisted_green(const PotentialBundle& b, const Current& omega) {
  const auto& g = b.model();
  const auto n = static_cast<Eigen::Index>(g.size());
  if (omega.size() != g.size()) throw DimensionMismatch("twisted_green: current size");
  ComplexMatrix m(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      const double c = g.conductance(x, y);
      m(x, y) = c == 0.0 ? std::complex<double>(0.0) : -c * std::polar(1.0, omega(x, y));
    }
    m(x, x) = g.lambda()(x);
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  const ComplexMatrix& u = lu.matrixLU();
  std::complex<double> log_det_m(0.0, 0.0);
  const double scale = g.lambda().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(u(i, i)) <= 1e-14 * scale) throw SingularMatrix("twisted energy matrix is singular");
    log_det_m += std::log(u(i, i));
  }
  if (lu.permutationP().determinant() < 0) log_det_m += std::complex<double>(0.0, M_PI);
  ComplexMatrix green = lu.solve(ComplexMatrix::Identity(n, n));
  green = 0.5 * (green + green.adjoint());
  // Reduce the phase to the principal branch.
  const double phase = std::remainder(-log_det_m.imag(), 2.0 * M_PI);
  return TwistedGreen{std::move(green), {-log_det_m.real(), phase}};
}

}  // namespace loopsoup
