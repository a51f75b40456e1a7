#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "loopsoup/green_kernel.hpp"
#include "loopsoup/loop_soup.hpp"
#include "loopsoup/random.hpp"
#include "loopsoup/report.hpp"

namespace loopsoup {

struct SuiteConfig {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 42;
  unsigned threads = 0;  // 0: hardware concurrency
  Thresholds thresholds;
};

// Every deterministic identity on one model: G kappa = 1, symmetry,
// G = V / lambda, determinant routes, resolvent, hitting decomposition and
// projection, Jacobi, trace factorization, h-transform, Laplace routes,
// avoidance consistency and (n <= 8) spanning-tree normalization.
Report run_verify_exact(const GraphModel& g, const Thresholds& t = {});

// Loop-soup laws at intensity alpha: occupation moments, Laplace
// functionals, visit-count laws, avoidance, generating function,
// conditional structure, permanental and orthogonality moments, currents,
// energy variation, multiple local times, trace restriction and discrete
// class frequencies.
Report run_soup_suite(const GraphModel& g, double alpha, const SuiteConfig& cfg,
                      TrivialMode mode = TrivialMode::Aggregate, double eps = 0.0);

// E((1 - exp(-L^x / G^{x,x}))^{-1}) = zeta(alpha) for alpha > 1 at every node.
Report run_zeta_suite(const GraphModel& g, double alpha, const SuiteConfig& cfg);

// L_{k/2} (soup) against (1/2) sum_{j<=k} phi_j^2 (field): moments 1-4, a
// cross moment, Laplace transforms at three chi, and a two-sample KS test
// (at most 10^4 draws per side).
Report dynkin_moment_report(const PotentialBundle& b, unsigned k, const SuiteConfig& cfg);

// E(phi^x phi^y F(phi^2/2)) and G^{x,y} E(F(L_{1/2} + bridge)) against
// (G_chi)^{x,y} sqrt(det G_chi / det G) for F = exp(-<., chi>); the same
// right side at intensity 1 must be rejected.
Report dynkin_bridge_report(const PotentialBundle& b, NodeIndex x, NodeIndex y, const Vector& chi,
                            const SuiteConfig& cfg);

// Q_n^{k/2,sigma}(L~_{k/2}) against (1/(2^n n!)) :(sum phi_j^2)^n: for
// n <= n_max: means and cross-node covariances.
Report renormalized_vs_wick_report(const PotentialBundle& b, unsigned k, unsigned n_max,
                                   const SuiteConfig& cfg);

// Field covariance, :phi^2: covariance, and the three reports above.
Report run_gff_suite(const GraphModel& g, const SuiteConfig& cfg);

// Wilson tree law (two orders), loop-erasure law of killed paths, erased
// network against an alpha = 1 soup, independence from the tree, and the
// tree-weight change under an h-transform.
Report run_wilson_suite(const GraphModel& g, const SuiteConfig& cfg);

// Path 1..N with killing at 1: Green function min(n, m), trace
// rates, immigration laws and the offspring distribution 2^{-k-1}.
Report run_branching_demo(std::size_t n, double alpha, const SuiteConfig& cfg);

// Erdos-Renyi graph on n nodes: edge probability 1/2, conductances in
// [0.5, 2], killing in [0, 1] with at least one positive entry; redrawn until
// connected.
GraphModel random_er_graph(std::size_t n, RandomStream& rng);

// Current equal to theta on the oriented edges (i, i+1 mod n) that exist.
Current cycle_current(const GraphModel& g, double theta);

// h = 1 + 0.2 G e_0 / G^{0,0}; always a valid h-transform.
Vector default_h(const PotentialBundle& b);

// Three killing perturbations: a point mass at node 0, a constant 0.5 and a
// pseudo-random one drawn from `seed`.
std::vector<Vector> test_chis(std::size_t n, std::uint64_t seed);

}  // namespace loopsoup
