#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/experiments.hpp"
#include "loopsoup/green_kernel.hpp"

using namespace loopsoup;
using namespace testing_support;

TEST(GreenKernel, G2FrozenValues) {
  const PotentialBundle b(g2());
  EXPECT_NEAR(b.green(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.green(0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.z_e(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.det_i_minus_p(), 0.75, 1e-15);
}

TEST(GreenKernel, T3FrozenValues) {
  const PotentialBundle b(t3());
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 3; ++y) EXPECT_NEAR(b.green(x, y), x == y ? 0.5 : 0.25, 1e-15);
  }
  EXPECT_NEAR(b.z_e(), 1.0 / 16.0, 1e-15);
}

TEST(GreenKernel, PathGreenIsMinimum) {
  const PotentialBundle b(pn(12));
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(b.green(i, j), std::min(i, j) + 1.0, 1e-11);
  }
}

TEST(GreenKernel, MatchesGaussJordanOracle) {
  RandomStream rng(7, 1);
  for (int rep = 0; rep < 10; ++rep) {
    const auto g = random_er_graph(6, rng);
    const PotentialBundle b(g);
    const auto ref = oracle::green(to_dense(g.conductance()), to_std(g.killing()));
    for (std::size_t x = 0; x < 6; ++x) {
      for (std::size_t y = 0; y < 6; ++y) EXPECT_NEAR(b.green(x, y), ref[x][y], 1e-12 * (1.0 + std::abs(ref[x][y])));
    }
    EXPECT_NEAR(b.log_z_e(), std::log(oracle::det(ref)), 1e-11);
  }
}

TEST(GreenKernel, LogDetHelpers) {
  Matrix a(2, 2);
  a << 4.0, 1.0, 1.0, 3.0;
  EXPECT_NEAR(log_det_spd(a).value(), 11.0, 1e-13);
  Matrix s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  const auto ld = log_det(s);
  EXPECT_NEAR(ld.value(), -1.0, 1e-14);
  Matrix sing = Matrix::Zero(2, 2);
  EXPECT_THROW(log_det_spd(sing), SingularMatrix);
}

TEST(GreenKernel, GreenChiResolvent) {
  const PotentialBundle b(t3());
  Vector chi(3);
  chi << 0.5, 0.0, 1.5;
  const Matrix gc = green_chi(b, chi);
  const Matrix lhs = b.green() - gc;
  const Matrix rhs = b.green() * chi.asDiagonal() * gc;
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-15);
  Vector neg = chi;
  neg(1) = -0.1;
  EXPECT_THROW(green_chi(b, neg), ValidationError);
}

TEST(GreenKernel, HittingMatrixRowsAreDistributions) {
  const PotentialBundle b(pn(8));
  const NodeSet f{2, 5};
  const Matrix h = hitting_matrix(b, f);
  // From node 1 (index 0) the chain is killed before hitting 3 w.p. 2/3,
  // since hitting level 3 from 1 on the path with killing at 1 is G^{1,3}/G^{3,3} = 1/3.
  EXPECT_NEAR(h(0, 0), 1.0 / 3.0, 1e-13);
  EXPECT_NEAR(h(0, 1), 0.0, 1e-13);
  EXPECT_NEAR(h(2, 0), 1.0, 1e-13);
  EXPECT_NEAR(h(7, 1), 1.0, 1e-13);
}

TEST(GreenKernel, TraceOnPathPrefix) {
  const PotentialBundle b(pn(10));
  for (std::size_t m = 1; m < 10; ++m) {
    NodeSet f(m);
    std::iota(f.begin(), f.end(), 0);
    const auto tm = trace_model(b, f);
    EXPECT_NEAR(tm.traced.lambda()(m - 1), 1.0, 1e-12);
    EXPECT_NEAR(tm.return_probability(m - 1), 0.5, 1e-12);
    const PotentialBundle tb(tm.traced);
    EXPECT_LT((tb.green() - submatrix(b.green(), f)).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(GreenKernel, TraceFactorizationOnT3) {
  const PotentialBundle b(t3());
  const NodeSet f{0, 2};
  const NodeSet d{1};
  const PotentialBundle tb(trace_model(b, f).traced);
  EXPECT_NEAR(b.log_z_e(), restricted_log_det(b, d).log_abs + tb.log_z_e(), 1e-14);
  // G^D on {2} alone is 1/3
  EXPECT_NEAR(restricted_green(b, d)(1, 1), 1.0 / 3.0, 1e-15);
}

TEST(GreenKernel, TwistedTriangle) {
  const auto g = t3();
  const PotentialBundle b(g);
  for (double theta : {0.0, M_PI / 3.0, 1.0, M_PI}) {
    const auto tw = twisted_green(b, cycle_current(g, theta));
    // det(M_lambda - C e^{i omega}) with lambda = 3: 27 - 9 - 2 cos(3 theta)
    const double det_m = 18.0 - 2.0 * std::cos(3.0 * theta);
    EXPECT_NEAR(std::abs(tw.z() - std::complex<double>(1.0 / det_m)), 0.0, 1e-14);
  }
  const auto tw = twisted_green(b, cycle_current(g, M_PI / 3.0));
  EXPECT_NEAR(tw.z().real() / b.z_e(), 0.8, 1e-14);
}

TEST(GreenKernel, SolveAgreesWithGreen) {
  const PotentialBundle b(t3());
  const Matrix rhs = Matrix::Identity(3, 3);
  EXPECT_LT((b.solve(rhs) - b.green()).cwiseAbs().maxCoeff(), 1e-15);
}
