#pragma once

#include <cstddef>
#include <vector>

#include "loopsoup/green_kernel.hpp"
#include "loopsoup/loops.hpp"

namespace loopsoup {

// Largest |eigenvalue| of P, computed on the symmetrized matrix
// M^{1/2} P M^{-1/2}.
double spectral_radius(const GraphModel& g);

// Smallest K >= 2 with n rho^K / (K (1 - rho)) < tail_tol, which bounds the
// loop mass carried by lengths above K. Throws ConvergenceFailure above
// `max_k`.
std::size_t default_truncation(const GraphModel& g, double tail_tol = 1e-12,
                               std::size_t max_k = 10'000'000);

// mu(p = k) = Tr(P^k) / k for k >= 2.
double mass_by_length(const PotentialBundle& b, std::size_t k);

// mu(p > 1) = -log det(I - P), evaluated from a factorization of I - P.
double nontrivial_mass(const PotentialBundle& b);

// Integral of p 1{p>1} d mu = Tr(G C).
double expected_jump_count(const PotentialBundle& b);

// prod_i P^{x_i}_{x_{i+1}} for the class representative.
double discrete_class_weight(const PotentialBundle& b, const DiscreteLoopClass& c);

// mu-mass of the class: (period / length) prod P. Equals the weight for
// aperiodic cycles.
double class_mass(const PotentialBundle& b, const DiscreteLoopClass& c);

// mu(l^{x_1..x_n}) = G^{x_1,x_2} G^{x_2,x_3} ... G^{x_n,x_1}.
double cyclic_green_product(const PotentialBundle& b, const std::vector<NodeIndex>& points);

// mu(e^{-<l,chi>} - 1) = log(det G_chi / det G).
double mu_laplace(const PotentialBundle& b, const Vector& chi);

// Same quantity as -log det(I + M_sqrt(chi) G M_sqrt(chi)).
double mu_laplace_symmetric(const PotentialBundle& b, const Vector& chi);

// mu(1{loop inside D} (e^{-<l,chi>} - 1)) = log(det G^D_chi / det G^D) for
// chi supported in D.
double mu_laplace_restricted(const PotentialBundle& b, const NodeSet& d, const Vector& chi);

// Probability that no nontrivial loop of L_alpha meets F:
// [prod_{x in F} lambda_x det(G|_{F x F})]^{-alpha}.
double avoidance_probability(const PotentialBundle& b, const NodeSet& f, double alpha);

// Probability that no nontrivial loop meets both F1 and F2 (disjoint sets).
double avoidance_two_sets(const PotentialBundle& b, const NodeSet& f1, const NodeSet& f2,
                          double alpha);

// mu(exp(i int_l omega) - 1) = log det(G^{(omega)} G^{-1}). Real for
// antisymmetric omega; throws if the imaginary part exceeds 1e-10.
double current_log_functional(const PotentialBundle& b, const Current& omega);

// Throws ValidationError if `e2` has a conductance or killing weight
// outside the support of `e`, or the node sets differ.
void check_same_support(const GraphModel& e, const GraphModel& e2);

// log d mu_{e2} / d mu_e on a loop:
// sum N_{x,y} log(C'_{x,y}/C_{x,y}) - sum (lambda'_x - lambda_x) l^x.
double rn_exponent(const GraphModel& e, const GraphModel& e2, const MarkedLoop& loop);

// Same exponent for one-point loops with occupation vector `occ` (only the
// lambda term contributes).
double rn_exponent_trivial(const GraphModel& e, const GraphModel& e2, const Vector& occ);

// log(Z_{e2} / Z_e).
double energy_change_log(const PotentialBundle& b, const GraphModel& e2);

// T_{x,y}(l) = l^x + l^y - (N_{x,y} + N_{y,x}) / C_{x,y}, the loop variable
// whose mu-mean is minus the derivative in C_{x,y}.
double energy_variation_t(const GraphModel& g, const MarkedLoop& loop, NodeIndex x, NodeIndex y);

// mu(T_{x,y}) = G^{x,x} + G^{y,y} - 2 G^{x,y}.
double mu_energy_variation_t(const PotentialBundle& b, NodeIndex x, NodeIndex y);

struct WeightedLoopClass {
  DiscreteLoopClass loop;
  double weight = 0.0;
};

// All loop classes with 2 <= length <= k_max and their mu-masses, grouped
// from based sequences (each based sequence carrying prod P / k). Sorted by
// (length, canonical cycle). Throws ResourceLimit when the number of based
// sequences exceeds `max_sequences`.
std::vector<WeightedLoopClass> enumerate_discrete_loops(const PotentialBundle& b, std::size_t k_max,
                                                        double max_sequences = 1e7);

}  // namespace loopsoup
