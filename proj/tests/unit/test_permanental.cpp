#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/gff.hpp"
#include "loopsoup/permanental.hpp"
#include "loopsoup/random.hpp"

using namespace loopsoup;
using namespace testing_support;

TEST(Permanent, MatchesBruteForceOnRandomMatrices) {
  RandomStream r(20, 5);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix a(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) a(i, j) = r.uniform() * 2.0 - 0.5;
    }
    const double alpha = 0.25 + 2.0 * r.uniform();
    const auto d = to_dense(a);
    const double ref = oracle::permanent(d, alpha);
    const double ref0 = oracle::permanent(d, alpha, true);
    EXPECT_NEAR(alpha_permanent(a, alpha), ref, 1e-10 * std::max(1.0, std::abs(ref)));
    EXPECT_NEAR(alpha_permanent_nofix(a, alpha), ref0, 1e-10 * std::max(1.0, std::abs(ref0)));
  }
}

TEST(Permanent, SpecialCases) {
  Matrix a(3, 3);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 10;
  // alpha = -1 gives (-1)^n det
  EXPECT_NEAR(alpha_permanent(a, -1.0), -oracle::det(to_dense(a)), 1e-12);
  // alpha = 1 is the ordinary permanent
  EXPECT_NEAR(alpha_permanent(a, 1.0), oracle::permanent(to_dense(a), 1.0), 1e-12);
  EXPECT_THROW(alpha_permanent(Matrix::Zero(kPermanentMaxDim + 1, kPermanentMaxDim + 1), 1.0), ResourceLimit);
  EXPECT_DOUBLE_EQ(alpha_permanent(Matrix::Zero(0, 0), 2.0), 1.0);
}

TEST(Permanent, G2Moments) {
  const PotentialBundle b(g2());
  EXPECT_NEAR(moment_prediction(b, 1.0, {0, 1}, MomentKind::Full).value, 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(moment_prediction(b, 1.0, {0, 1}, MomentKind::Centered).value, 1.0 / 9.0, 1e-15);
  // E(L^x)^3 = (alpha)_3 G^3
  EXPECT_NEAR(moment_prediction(b, 0.5, {0, 0, 0}, MomentKind::Full).value,
              oracle::rising(0.5, 3) * std::pow(2.0 / 3.0, 3), 1e-15);
}

TEST(Polynomials, FrozenValues) {
  EXPECT_NEAR(qk_poly(3, 1.0, 1.0, 2.0), -1.0, 1e-15);
  EXPECT_DOUBLE_EQ(rising_factorial(0.5, 3), 0.5 * 1.5 * 2.5);
  EXPECT_DOUBLE_EQ(rising_factorial(2.0, 0), 1.0);
  for (double u : {-1.3, 0.0, 0.7, 2.2}) {
    EXPECT_NEAR(hermite_eval(4, u), u * u * u * u - 6 * u * u + 3, 1e-13);
    const double a = 0.4;
    EXPECT_NEAR(laguerre_eval(2, a, u), (a + 1) * (a + 2) / 2 - (a + 2) * u + u * u / 2, 1e-13);
  }
}

TEST(Polynomials, QIsShiftedP) {
  for (unsigned k = 0; k <= 6; ++k) {
    for (double alpha : {0.5, 1.0, 2.5}) {
      for (double sigma : {0.3, 1.0, 2.0}) {
        for (double u : {-0.5, 0.1, 1.7}) {
          const double q = qk_poly(k, alpha, sigma, u);
          EXPECT_NEAR(q, pk_poly(k, alpha, sigma, u + alpha * sigma), 1e-10 * std::max(1.0, std::abs(q)));
        }
      }
    }
  }
}

// E Q_k Q_l under L ~ Gamma(alpha, sigma), by Simpson quadrature in t with
// L = t^2, which removes the singularity of the density at 0.
TEST(Polynomials, OrthogonalUnderGamma) {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const double sigma = 0.7;
    const int m = 200000;
    const double top = std::sqrt(80.0 * sigma * (alpha + 3.0));
    const double h = top / m;
    for (unsigned k = 0; k <= 3; ++k) {
      for (unsigned l = 0; l <= 3; ++l) {
        double s = 0.0;
        for (int i = 0; i <= m; ++i) {
          const double t = i * h;
          const double x = t * t;
          // density of L times dx/dt = 2 t
          const double dens = 2.0 * std::pow(t, 2.0 * alpha - 1.0) * std::exp(-x / sigma - std::lgamma(alpha)) /
                              std::pow(sigma, alpha);
          const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
          const double u = x - alpha * sigma;
          s += w * dens * qk_poly(k, alpha, sigma, u) * qk_poly(l, alpha, sigma, u);
        }
        s *= h / 3.0;
        const double expect = k == l ? std::pow(sigma, 2.0 * k) * oracle::rising(alpha, k) / oracle::factorial(k) : 0.0;
        EXPECT_NEAR(s, expect, 1e-9) << "alpha=" << alpha << " k=" << k << " l=" << l;
      }
    }
  }
}

TEST(Polynomials, NegativeBinomialPmf) {
  double total = 0.0;
  for (std::uint64_t n = 0; n < 400; ++n) total += negbinom_pmf(1.5, 0.3, n);
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(negbinom_pmf(1.0, 0.75, 2), 0.75 * 0.25 * 0.25, 1e-15);
  EXPECT_THROW(negbinom_pmf(1.0, 0.0, 1), ValidationError);
}

TEST(Wick, PowersAndSumSquares) {
  EXPECT_NEAR(wick_power(1.5, 2.0, 2), 1.5 * 1.5 - 2.0, 1e-14);
  EXPECT_NEAR(wick_power(1.5, 2.0, 3), 1.5 * 1.5 * 1.5 - 3.0 * 2.0 * 1.5, 1e-14);
  RandomStream r(4, 4);
  for (std::size_t k = 1; k <= 3; ++k) {
    for (unsigned n = 0; n <= 4; ++n) {
      std::vector<double> v(k);
      for (auto& x : v) x = r.normal() * 1.3;
      const double a = wick_sum_square_power(v, 1.69, n);
      const double b = wick_sum_square_power_multinomial(v, 1.69, n);
      EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::abs(a))) << "k=" << k << " n=" << n;
    }
  }
}
