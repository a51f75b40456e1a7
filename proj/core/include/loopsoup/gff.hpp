#pragma once

#include <span>
#include <vector>

#include "loopsoup/green_kernel.hpp"
#include "loopsoup/random.hpp"

namespace loopsoup {

/// k independent copies of the centered Gaussian field with covariance G.
struct FieldSample {
  std::vector<Vector> copies;
  Vector sigma;  // diagonal of G

  // (1/2) sum_j (phi_j^x)^2 for every node.
  Vector half_square_sum() const;
};

class FieldSampler {
 public:
  // Factorizes G = A A^T (Cholesky, with an eigendecomposition fallback when
  // a pivot drops below 1e-12 ||G||).
  explicit FieldSampler(const PotentialBundle& b);

  Vector sample(RandomStream& rng) const;
  FieldSample sample(std::size_t k, RandomStream& rng) const;
  const Matrix& factor() const { return factor_; }

 private:
  Matrix factor_;
  Vector sigma_;
};

FieldSample gff_sample(const PotentialBundle& b, std::size_t k, RandomStream& rng);

// :phi^n: = sigma^{n/2} He_n(phi / sqrt(sigma)).
double wick_power(double value, double sigma, unsigned n);

// (1 / (2^n n!)) :(sum_j phi_j^2)^n: computed as P_n^{k/2,sigma}(sum phi_j^2 / 2),
// with :sum phi_j^2: = sum (phi_j^2 - sigma).
double wick_sum_square_power(std::span<const double> values, double sigma, unsigned n);

// Same quantity through the multinomial expansion into products of
// :phi_j^{2 n_j}:.
double wick_sum_square_power_multinomial(std::span<const double> values, double sigma, unsigned n);

}  // namespace loopsoup
