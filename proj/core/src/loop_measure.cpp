#include "loopsoup/loop_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include <Eigen/Eigenvalues>

#include "loopsoup/errors.hpp"

namespace loopsoup {

namespace {

Matrix matrix_power(const Matrix& a, std::size_t k) {
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix base = a;
  while (k > 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

void check_chi(const Vector& chi, std::size_t n) {
  if (chi.size() != static_cast<Eigen::Index>(n)) throw DimensionMismatch("chi size");
  for (Eigen::Index i = 0; i < chi.size(); ++i) {
    if (!(chi(i) >= 0.0) || !std::isfinite(chi(i))) {
      throw ValidationError("chi must be finite and nonnegative");
    }
  }
}

}  // namespace

double spectral_radius(const GraphModel& g) {
  const Vector s = g.lambda().cwiseSqrt();
  const Vector inv = s.cwiseInverse();
  // M^{1/2} P M^{-1/2} = M^{-1/2} C M^{-1/2}, symmetric.
  const Matrix sym = inv.asDiagonal() * g.conductance() * inv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::size_t default_truncation(const GraphModel& g, double tail_tol, std::size_t max_k) {
  const double rho = spectral_radius(g);
  if (rho == 0.0) return 2;
  if (rho >= 1.0) throw ConvergenceFailure("spectral radius of P is not below 1");
  const double n = static_cast<double>(g.size());
  const double log_rho = std::log(rho);
  const double log_gap = std::log1p(-rho);
  for (std::size_t k = 2; k <= max_k; ++k) {
    const double log_tail = std::log(n) + static_cast<double>(k) * log_rho -
                            std::log(static_cast<double>(k)) - log_gap;
    if (log_tail < std::log(tail_tol)) return k;
  }
  throw ConvergenceFailure("loop length truncation exceeds the allowed maximum");
}

double mass_by_length(const PotentialBundle& b, std::size_t k) {
  if (k < 2) throw ValidationError("mass_by_length: k must be at least 2");
  return matrix_power(b.model().transition(), k).trace() / static_cast<double>(k);
}

double nontrivial_mass(const PotentialBundle& b) {
  const auto n = static_cast<Eigen::Index>(b.size());
  const Matrix i_minus_p = Matrix::Identity(n, n) - b.model().transition();
  const LogDet d = log_det(i_minus_p);
  if (d.sign <= 0.0) throw SingularMatrix("det(I - P) is not positive");
  return -d.log_abs;
}

double expected_jump_count(const PotentialBundle& b) {
  return (b.green() * b.model().conductance()).trace();
}

double discrete_class_weight(const PotentialBundle& b, const DiscreteLoopClass& c) {
  const auto& g = b.model();
  const auto& cyc = c.cycle();
  const auto k = cyc.size();
  if (k < 2) throw ValidationError("invalid loop class");
  double w = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto x = cyc[i];
    const auto y = cyc[(i + 1) % k];
    if (x >= g.size() || y >= g.size() || !g.has_edge(x, y)) {
      throw ValidationError("loop class uses a non-edge");
    }
    w *= g.transition()(x, y);
  }
  return w;
}

double class_mass(const PotentialBundle& b, const DiscreteLoopClass& c) {
  return discrete_class_weight(b, c) * static_cast<double>(c.period()) /
         static_cast<double>(c.length());
}

double cyclic_green_product(const PotentialBundle& b, const std::vector<NodeIndex>& points) {
  if (points.empty()) throw ValidationError("cyclic_green_product: no points");
  double v = 1.0;
  const auto n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = points[i];
    const auto y = points[(i + 1) % n];
    if (x >= b.size() || y >= b.size()) throw ValidationError("point out of range");
    v *= b.green(x, y);
  }
  return v;
}

double mu_laplace(const PotentialBundle& b, const Vector& chi) {
  check_chi(chi, b.size());
  Matrix m = b.model().energy_matrix();
  m.diagonal() += chi;
  // log det G_chi - log det G = -log det(M + chi) + log det(M)
  return -log_det_spd(m).log_abs - b.log_z_e();
}

double mu_laplace_symmetric(const PotentialBundle& b, const Vector& chi) {
  check_chi(chi, b.size());
  const Vector s = chi.cwiseSqrt();
  const auto n = static_cast<Eigen::Index>(b.size());
  const Matrix a = Matrix::Identity(n, n) + s.asDiagonal() * b.green() * s.asDiagonal();
  return -log_det_spd(a).log_abs;
}

double mu_laplace_restricted(const PotentialBundle& b, const NodeSet& d_in, const Vector& chi) {
  check_chi(chi, b.size());
  const auto d = normalize_set(d_in, b.size());
  for (auto x : complement(d, b.size())) {
    if (chi(x) != 0.0) throw ValidationError("mu_laplace_restricted: chi not supported in D");
  }
  if (d.empty()) return 0.0;
  Matrix m = submatrix(b.model().energy_matrix(), d);
  const double base = log_det_spd(m).log_abs;
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) += chi(d[i]);
  return base - log_det_spd(m).log_abs;
}

double avoidance_probability(const PotentialBundle& b, const NodeSet& f_in, double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  const auto f = normalize_set(f_in, b.size());
  if (f.empty()) return 1.0;
  double log_v = log_det_spd(submatrix(b.green(), f)).log_abs;
  for (auto x : f) log_v += std::log(b.model().lambda()(x));
  return std::exp(-alpha * log_v);
}

double avoidance_two_sets(const PotentialBundle& b, const NodeSet& f1_in, const NodeSet& f2_in,
                          double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  const auto n = b.size();
  const auto f1 = normalize_set(f1_in, n);
  const auto f2 = normalize_set(f2_in, n);
  for (auto x : f1) {
    if (std::binary_search(f2.begin(), f2.end(), x)) {
      throw ValidationError("avoidance_two_sets: sets must be disjoint");
    }
  }
  if (f1.empty() || f2.empty()) return 1.0;
  const auto d1 = complement(f1, n);
  const auto d2 = complement(f2, n);
  NodeSet d12;
  std::set_intersection(d1.begin(), d1.end(), d2.begin(), d2.end(), std::back_inserter(d12));
  const double log_ratio = b.log_z_e() + restricted_log_det(b, d12).log_abs -
                           restricted_log_det(b, d1).log_abs - restricted_log_det(b, d2).log_abs;
  return std::exp(-alpha * log_ratio);
}

double current_log_functional(const PotentialBundle& b, const Current& omega) {
  const auto tw = twisted_green(b, omega);
  const std::complex<double> v = tw.log_z - b.log_z_e();
  const double im = std::remainder(v.imag(), 2.0 * M_PI);
  if (std::abs(im) > 1e-10) {
    throw ValidationError("current_log_functional: non-real value (current not antisymmetric?)");
  }
  return v.real();
}

void check_same_support(const GraphModel& e, const GraphModel& e2) {
  if (e.size() != e2.size() || e.names() != e2.names()) {
    throw ValidationError("energy forms live on different node sets");
  }
  const auto n = e.size();
  for (std::size_t x = 0; x < n; ++x) {
    if (e2.killing()(x) > 0.0 && !(e.killing()(x) > 0.0)) {
      throw ValidationError("second energy form kills outside the support of the first");
    }
    for (std::size_t y = 0; y < n; ++y) {
      if (e2.conductance(x, y) > 0.0 && !(e.conductance(x, y) > 0.0)) {
        throw ValidationError("second energy form adds an edge outside the support of the first");
      }
    }
  }
}

double rn_exponent(const GraphModel& e, const GraphModel& e2, const MarkedLoop& loop) {
  check_same_support(e, e2);
  const auto k = loop.visits.size();
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto x = loop.visits[i];
    const auto y = loop.visits[(i + 1) % k];
    const double c = e.conductance(x, y);
    if (!(c > 0.0)) throw ValidationError("rn_exponent: loop uses a non-edge");
    const double c2 = e2.conductance(x, y);
    s += c2 > 0.0 ? std::log(c2 / c) : -HUGE_VAL;
    s -= (e2.lambda()(x) - e.lambda()(x)) * loop.holding[i];
  }
  return s;
}

double rn_exponent_trivial(const GraphModel& e, const GraphModel& e2, const Vector& occ) {
  if (occ.size() != static_cast<Eigen::Index>(e.size())) throw DimensionMismatch("occupation size");
  return -(e2.lambda() - e.lambda()).dot(occ);
}

double energy_change_log(const PotentialBundle& b, const GraphModel& e2) {
  check_same_support(b.model(), e2);
  return -log_det_spd(e2.energy_matrix()).log_abs - b.log_z_e();
}

double energy_variation_t(const GraphModel& g, const MarkedLoop& loop, NodeIndex x, NodeIndex y) {
  const double c = g.conductance(x, y);
  if (!(c > 0.0)) throw ValidationError("energy_variation_t: (x,y) is not an edge");
  const auto k = loop.visits.size();
  double crossings = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto u = loop.visits[i];
    const auto v = loop.visits[(i + 1) % k];
    if ((u == x && v == y) || (u == y && v == x)) crossings += 1.0;
  }
  return loop.occupation(x) + loop.occupation(y) - crossings / c;
}

double mu_energy_variation_t(const PotentialBundle& b, NodeIndex x, NodeIndex y) {
  return b.green(x, x) + b.green(y, y) - 2.0 * b.green(x, y);
}

namespace {

std::vector<std::vector<std::size_t>> all_pairs_distances(const GraphModel& g) {
  const auto n = g.size();
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<std::size_t>> dist(n, std::vector<std::size_t>(n, kInf));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<std::size_t> q;
    dist[s][s] = 0;
    q.push(s);
    while (!q.empty()) {
      const auto x = q.front();
      q.pop();
      for (auto y : g.neighbors(x)) {
        if (dist[s][y] == kInf) {
          dist[s][y] = dist[s][x] + 1;
          q.push(y);
        }
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<WeightedLoopClass> enumerate_discrete_loops(const PotentialBundle& b, std::size_t k_max,
                                                        double max_sequences) {
  const auto& g = b.model();
  const auto n = g.size();
  if (k_max < 2) return {};

  // Closed-walk count sum_{k<=Kmax} Tr(A^k) bounds the work.
  Matrix adj = (g.conductance().array() > 0.0).cast<double>();
  Matrix power = Matrix::Identity(n, n);
  double walks = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    power = power * adj;
    walks += power.trace();
    if (walks > max_sequences) {
      throw ResourceLimit("enumerate_discrete_loops: too many based sequences");
    }
  }

  const auto dist = all_pairs_distances(g);
  const Matrix& p = g.transition();
  std::map<std::vector<NodeIndex>, double> classes;
  std::vector<NodeIndex> seq;
  seq.reserve(k_max);

  // Depth-first enumeration of closed walks based at `start`.
  auto visit = [&](auto&& self, NodeIndex start, NodeIndex cur, double weight) -> void {
    const auto len = seq.size();
    for (auto w : g.neighbors(cur)) {
      const double wt = weight * p(cur, w);
      if (w == start) {
        if (len >= 2) classes[canonical_rotation(seq)] += wt / static_cast<double>(len);
        // closing at length 1 would need P^x_x > 0, excluded by construction
      }
      // after pushing w the walk still needs dist(w, start) closing steps
      if (len < k_max && dist[w][start] <= k_max - len && w != start) {
        seq.push_back(w);
        self(self, start, w, wt);
        seq.pop_back();
      } else if (len < k_max && w == start) {
        // walks passing through the base point again are still based
        // sequences; continue them as well
        seq.push_back(w);
        self(self, start, w, wt);
        seq.pop_back();
      }
    }
  };
  for (NodeIndex x = 0; x < n; ++x) {
    seq.assign(1, x);
    visit(visit, x, x, 1.0);
  }

  std::vector<WeightedLoopClass> out;
  out.reserve(classes.size());
  for (auto& [cyc, w] : classes) out.push_back({DiscreteLoopClass::from_valid(cyc), w});
  std::sort(out.begin(), out.end(),
            [](const WeightedLoopClass& a, const WeightedLoopClass& c) { return a.loop < c.loop; });
  return out;
}

}  // namespace loopsoup
