#pragma once

#include <complex>

#include <Eigen/Dense>

#include "loopsoup/graph_model.hpp"

namespace loopsoup {

using ComplexMatrix = Eigen::MatrixXcd;

// Determinant kept as log|det| plus a sign, so that quantities such as Z_e
// on long paths stay representable.
struct LogDet {
  double log_abs = 0.0;
  double sign = 1.0;

  double value() const;
};

// log-determinant of a symmetric positive definite matrix through a pivoted
// LDL^T factorization. Throws SingularMatrix on a nonpositive pivot.
LogDet log_det_spd(const Matrix& a);

// log-determinant of a general real matrix through partial-pivot LU.
LogDet log_det(const Matrix& a);

// Principal submatrix a|_{rows x rows}.
Matrix submatrix(const Matrix& a, const NodeSet& rows);
Matrix submatrix(const Matrix& a, const NodeSet& rows, const NodeSet& cols);

/// Exact potential-theoretic quantities of a model.
///
/// Holds the Green matrix G = (M_lambda - C)^{-1}, the potential
/// V = (I - P)^{-1} (so that G^{x,y} = V^x_y / lambda_y), Z_e = det(G) and
/// det(I - P) = 1 / (Z_e prod lambda). The factorization of M_lambda - C is
/// kept for later solves.
class PotentialBundle {
 public:
  explicit PotentialBundle(GraphModel g);

  const GraphModel& model() const { return model_; }
  std::size_t size() const { return model_.size(); }

  const Matrix& green() const { return green_; }
  const Matrix& potential() const { return potential_; }
  double green(NodeIndex x, NodeIndex y) const { return green_(x, y); }

  double z_e() const { return std::exp(log_z_e_); }
  double log_z_e() const { return log_z_e_; }
  double det_i_minus_p() const { return std::exp(log_det_i_minus_p_); }
  double log_det_i_minus_p() const { return log_det_i_minus_p_; }

  // (M_lambda - C)^{-1} rhs using the cached factorization.
  Matrix solve(const Matrix& rhs) const;

 private:
  GraphModel model_;
  Eigen::LDLT<Matrix> factor_;
  Matrix green_;
  Matrix potential_;
  double log_z_e_ = 0.0;
  double log_det_i_minus_p_ = 0.0;
};

// G_chi = (M_lambda + M_chi - C)^{-1}.
Matrix green_chi(const PotentialBundle& b, const Vector& chi);

// Hitting distribution of F: rows indexed by all nodes, columns by the sorted
// nodes of F. Entry (x, j) is the probability that the chain started at x
// first hits F at F[j].
Matrix hitting_matrix(const PotentialBundle& b, const NodeSet& f);

// Green function of the chain killed outside D, embedded in an n x n matrix
// with zeros outside D x D.
Matrix restricted_green(const PotentialBundle& b, const NodeSet& d);

// log det of the Green function killed outside D (1 for D empty).
LogDet restricted_log_det(const PotentialBundle& b, const NodeSet& d);

/// Trace of the chain on a retained set F (excursions into D = F^c are
/// collapsed): C^F_{x,y} = C_{x,y} + sum_{a,b in D} C_{x,a} C_{b,y} G^D_{a,b},
/// lambda^F_x = lambda_x (1 - p^F_x). The traced model lives on F (in sorted
/// index order) and its Green function is G restricted to F x F.
struct TraceModel {
  NodeSet retained;
  GraphModel traced;
  Vector return_probability;  // p^F_x, aligned with `retained`
};

TraceModel trace_model(const PotentialBundle& b, const NodeSet& f);

struct TwistedGreen {
  ComplexMatrix green;         // (M_lambda - C o e^{i omega})^{-1}
  std::complex<double> log_z;  // log det(green), principal branch of the phase
  std::complex<double> z() const { return std::exp(log_z); }
};

// Green function twisted by a current. Throws SingularMatrix if the twisted
// matrix is singular.
TwistedGreen twisted_green(const PotentialBundle& b, const Current& omega);

}  // namespace loopsoup
