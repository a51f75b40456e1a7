#pragma once

#include <cstdint>
#include <vector>

#include "loopsoup/green_kernel.hpp"

namespace loopsoup {

// Largest dimension accepted by the permutation-enumerating permanents.
inline constexpr std::size_t kPermanentMaxDim = 10;

// Per_alpha(A) = sum over permutations of alpha^{cycles} prod A_{i,sigma(i)}.
double alpha_permanent(const Matrix& a, double alpha);

// Same sum restricted to permutations without fixed points.
double alpha_permanent_nofix(const Matrix& a, double alpha);

// Rising factorial alpha (alpha+1) ... (alpha+n-1).
double rising_factorial(double alpha, unsigned n);

// Generalized Laguerre L_k^{(a)}(u) by the three-term recurrence.
double laguerre_eval(unsigned k, double a, double u);

// P_k^{alpha,sigma}(x) = (-sigma)^k L_k^{(alpha-1)}(x / sigma).
double pk_poly(unsigned k, double alpha, double sigma, double x);

// Q_k^{alpha,sigma}(u) = P_k^{alpha,sigma}(u + alpha sigma), through
// n Q_n = (u - 2 sigma (n-1)) Q_{n-1} - sigma^2 (alpha + n - 2) Q_{n-2}.
double qk_poly(unsigned k, double alpha, double sigma, double u);

// Probabilists' Hermite polynomial He_n(u).
double hermite_eval(unsigned n, double u);

// Q_k^{alpha, G^{x,x}}(centered[x]) for every node.
Vector renormalized_power_field(const PotentialBundle& b, double alpha, const Vector& centered,
                                unsigned k);

// P(N = n) = (alpha)_n / n! q^alpha (1 - q)^n.
double negbinom_pmf(double alpha, double q, std::uint64_t n);

enum class MomentKind { Full, Centered };

struct MomentPrediction {
  std::vector<NodeIndex> points;
  double value = 0.0;
  MomentKind kind = MomentKind::Full;
};

// E(prod L^{i_j}) = Per_alpha(G|points) or E(prod L~^{i_j}) = Per0_alpha.
MomentPrediction moment_prediction(const PotentialBundle& b, double alpha,
                                   const std::vector<NodeIndex>& points, MomentKind kind);

}  // namespace loopsoup
