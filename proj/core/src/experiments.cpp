#include "loopsoup/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>

#include "loopsoup/erasure_wilson.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/gff.hpp"
#include "loopsoup/loop_measure.hpp"
#include "loopsoup/permanental.hpp"
#include "loopsoup/stats.hpp"

namespace loopsoup {

namespace {

// Stream tags, one per independent experiment.
enum Tag : std::uint64_t {
  kTagSoup = 1,
  kTagTrace,
  kTagZeta,
  kTagDynkinSoup,
  kTagDynkinField,
  kTagKsSoup,
  kTagKsField,
  kTagBridgeField,
  kTagBridgeRight,
  kTagBridgeWrong,
  kTagWickSoup,
  kTagWickField,
  kTagFieldCov,
  kTagWilson,
  kTagWilsonReverse,
  kTagWilsonSoup,
  kTagErasure,
  kTagBranching,
  kTagChi,
};

/// Named observables with targets, filled per replica.
class Observables {
 public:
  std::size_t add(std::string name, double target) {
    names_.push_back(std::move(name));
    targets_.push_back(target);
    return names_.size() - 1;
  }
  // Block of counters without individual targets (histograms).
  std::size_t add_block(std::size_t count) {
    const auto first = names_.size();
    for (std::size_t i = 0; i < count; ++i) add({}, std::nan(""));
    return first;
  }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  double target(std::size_t i) const { return targets_[i]; }

  // Adds every named observable as a statistical entry.
  void report(Report& r, const std::vector<RunningStats>& s, std::uint64_t seed) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) continue;
      r.add_statistical(names_[i], s[i], targets_[i], seed);
    }
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> targets_;
};

std::vector<double> counts(const std::vector<RunningStats>& s, std::size_t first, std::size_t len) {
  std::vector<double> out(len);
  for (std::size_t i = 0; i < len; ++i) out[i] = std::round(s[first + i].sum());
  return out;
}

// Merges bins whose expected count is below 5 into the last bin.
void merge_small_bins(std::vector<double>& obs, std::vector<double>& prob, double total) {
  std::vector<double> o2, p2;
  double tail_o = 0.0, tail_p = 0.0;
  for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
    if (prob[i] * total >= 5.0) {
      o2.push_back(obs[i]);
      p2.push_back(prob[i]);
    } else {
      tail_o += obs[i];
      tail_p += prob[i];
    }
  }
  tail_o += obs.back();
  tail_p += prob.back();
  o2.push_back(tail_o);
  p2.push_back(tail_p);
  obs = std::move(o2);
  prob = std::move(p2);
}

std::string nm(const GraphModel& g, NodeIndex x) { return g.name(x); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double rel_residual(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Adds an exact entry comparing `value` with `target` scaled so that the
// report tolerance is relative.
void add_rel(Report& r, std::string name, double value, double target) {
  const double scale = std::max(1.0, std::abs(target));
  r.add_exact(std::move(name), value / scale, target / scale);
}

double log_det_g(const Matrix& g) { return log_det_spd(g).log_abs; }

// Chi-square frequency test; with a single possible outcome every draw must
// land in it.
void add_frequency_test(Report& r, const std::string& name, const std::vector<double>& obs,
                        const std::vector<double>& prob, std::uint64_t n, std::uint64_t seed) {
  if (obs.size() < 2) {
    r.add_check(name + ": single outcome", obs.size() == 1 && obs[0] == static_cast<double>(n));
    return;
  }
  r.add_gof(name, chi_square_gof(obs, prob), n, seed);
}

}  // namespace

std::vector<Vector> test_chis(std::size_t n, std::uint64_t seed) {
  std::vector<Vector> out;
  Vector a = Vector::Zero(n);
  a(0) = 1.0;
  out.push_back(a);
  out.push_back(Vector::Constant(n, 0.5));
  RandomStream rng(seed, mix64(kTagChi));
  Vector c(n);
  for (std::size_t x = 0; x < n; ++x) c(x) = 2.0 * rng.uniform();
  out.push_back(c);
  return out;
}

Vector default_h(const PotentialBundle& b) {
  const Vector col = b.green().col(0);
  return Vector::Ones(b.size()) + 0.2 * col / col(0);
}

Current cycle_current(const GraphModel& g, double theta) {
  Current omega(g);
  const auto n = g.size();
  std::vector<std::vector<char>> done(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (j == i || !g.has_edge(i, j) || done[i][j]) continue;
    omega.set(i, j, theta);
    done[i][j] = done[j][i] = 1;
  }
  return omega;
}

GraphModel random_er_graph(std::size_t n, RandomStream& rng) {
  if (n == 0) throw ValidationError("random_er_graph: n must be positive");
  for (;;) {
    Matrix c = Matrix::Zero(n, n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        if (rng.uniform() < 0.5) c(x, y) = c(y, x) = 0.5 + 1.5 * rng.uniform();
      }
    }
    Vector kappa(n);
    for (std::size_t x = 0; x < n; ++x) kappa(x) = rng.uniform();
    std::vector<std::string> names;
    for (std::size_t x = 0; x < n; ++x) names.push_back("v" + std::to_string(x));
    try {
      return GraphModel::from_matrices(std::move(names), std::move(c), std::move(kappa));
    } catch (const ValidationError&) {
      // disconnected draw
    }
  }
}

// ---------------------------------------------------------------------------
// Exact identities

Report run_verify_exact(const GraphModel& g, const Thresholds& t) {
  Report r("exact identities", t);
  const PotentialBundle b(g);
  const auto n = g.size();
  const Matrix& G = b.green();
  const Vector& lam = g.lambda();

  r.add_exact("G kappa = 1 (max residual)", max_abs(G * g.killing() - Vector::Ones(n)), 0.0);
  r.add_exact("G symmetric (max residual)", max_abs(G - G.transpose()), 0.0);
  r.add_exact("G = V / lambda (max residual)",
              max_abs(G - b.potential() * lam.cwiseInverse().asDiagonal()) / std::max(1.0, max_abs(G)), 0.0);
  r.add_exact("lambda-symmetry of P (max residual)",
              max_abs(lam.asDiagonal() * g.transition() - (lam.asDiagonal() * g.transition()).transpose()), 0.0);
  {
    const double lhs = b.log_det_i_minus_p() + b.log_z_e() + lam.array().log().sum();
    r.add_exact("det(I-P) Z_e prod lambda = 1 (log)", lhs, 0.0);
    const Matrix ip = Matrix::Identity(n, n) - g.transition();
    r.add_exact("det(I-P) by LU vs Cholesky (log)", log_det(ip).log_abs - b.log_det_i_minus_p(), 0.0);
    add_rel(r, "mu(p>1) = log(Z_e prod lambda)", nontrivial_mass(b),
            b.log_z_e() + lam.array().log().sum());
  }
  const auto chis = test_chis(n, 0);
  for (std::size_t i = 0; i < chis.size(); ++i) {
    const Matrix gc = green_chi(b, chis[i]);
    const std::string tag = "chi#" + std::to_string(i + 1);
    r.add_exact("resolvent G - G_chi = G M_chi G_chi, " + tag,
                max_abs(G - gc - G * chis[i].asDiagonal() * gc) / std::max(1.0, max_abs(G)), 0.0);
    add_rel(r, "Laplace routes agree, " + tag, mu_laplace(b, chis[i]), mu_laplace_symmetric(b, chis[i]));
  }
  r.add_exact("avoidance(F = X) = det(I-P) (log)",
              std::log(avoidance_probability(b, [&] {
                NodeSet all(n);
                std::iota(all.begin(), all.end(), 0);
                return all;
              }(), 1.0)) - b.log_det_i_minus_p(),
              0.0);

  // Subsets F for the set identities: all proper nonempty subsets for small
  // graphs, prefixes otherwise.
  std::vector<NodeSet> subsets;
  if (n <= 8) {
    for (std::uint32_t mask = 1; mask + 1 < (1U << n); ++mask) {
      NodeSet f;
      for (std::size_t x = 0; x < n; ++x) {
        if (mask & (1U << x)) f.push_back(x);
      }
      subsets.push_back(f);
    }
  } else {
    for (std::size_t m = 1; m < n; m = m * 2) {
      NodeSet f(m);
      std::iota(f.begin(), f.end(), 0);
      subsets.push_back(f);
    }
  }
  double jacobi = 0.0, trace_z = 0.0, trace_g = 0.0, hit = 0.0, proj = 0.0, trace_p = 0.0;
  RandomStream rng(0, 99);
  for (const auto& f : subsets) {
    const auto d = complement(f, n);
    const double ld_d = restricted_log_det(b, d).log_abs;
    const double ld_f = log_det_g(submatrix(G, f));
    jacobi = std::max(jacobi, std::abs(ld_d + ld_f - b.log_z_e()));
    const auto tm = trace_model(b, f);
    const PotentialBundle tb(tm.traced);
    trace_z = std::max(trace_z, std::abs(b.log_z_e() - (ld_d + tb.log_z_e())));
    trace_g = std::max(trace_g, max_abs(tb.green() - submatrix(G, f)) / std::max(1.0, max_abs(G)));
    for (std::size_t i = 0; i < f.size(); ++i) {
      trace_p = std::max(trace_p, std::abs(tm.traced.lambda()(i) -
                                           lam(f[i]) * (1.0 - tm.return_probability(i))));
    }
    const Matrix h = hitting_matrix(b, f);
    const Matrix gd = restricted_green(b, d);
    Matrix hg(n, n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        double s = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) s += h(x, j) * G(f[j], y);
        hg(x, y) = s;
      }
    }
    hit = std::max(hit, max_abs(G - gd - hg) / std::max(1.0, max_abs(G)));
    // e(H^F u, w) = 0 for w supported in D
    Vector u(f.size());
    for (auto& v : u) v = rng.uniform() - 0.5;
    Vector w = Vector::Zero(n);
    for (auto x : d) w(x) = rng.uniform() - 0.5;
    proj = std::max(proj, std::abs(energy_form(g, h * u, w)));
  }
  r.add_exact("Jacobi det G^D det G|F = det G (max log residual)", jacobi, 0.0);
  r.add_exact("trace factorization Z_e = Z_{e^D} Z_{e^F} (max log residual)", trace_z, 0.0);
  r.add_exact("trace Green = G|F (max residual)", trace_g, 0.0);
  r.add_exact("trace lambda^F = lambda (1 - p^F) (max residual)", trace_p, 0.0);
  r.add_exact("G = G^D + H^F G (max residual)", hit, 0.0);
  r.add_exact("e(H^F u, w) = 0 for w in D (max)", proj, 0.0);
  {
    double egm = 0.0;
    for (int i = 0; i < 100; ++i) {
      Vector f(n), mu(n);
      for (std::size_t x = 0; x < n; ++x) {
        f(x) = rng.uniform() - 0.5;
        mu(x) = rng.uniform() - 0.5;
      }
      egm = std::max(egm, rel_residual(energy_form(g, f, G * mu), f.dot(mu)));
    }
    r.add_exact("e(f, G mu) = <f, mu> (max residual)", egm, 0.0);
  }
  {
    const Vector h = default_h(b);
    const GraphModel gh = h_transform(g, h);
    const PotentialBundle hb(gh);
    const Matrix back = hb.green().cwiseProduct(h * h.transpose());
    r.add_exact("h-transform G' h h = G (max residual)", max_abs(back - G) / std::max(1.0, max_abs(G)), 0.0);
    r.add_exact("h-transform log Z'/Z = -2 sum log h",
                hb.log_z_e() - b.log_z_e() + 2.0 * h.array().log().sum(), 0.0);
  }
  if (n <= 8) {
    const auto trees = enumerate_spanning_trees(b);
    double total = 0.0;
    for (const auto& t : trees) total += t.weight;
    r.add_exact("sum of spanning tree weights = 1", total, 1.0);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Soup suite

Report run_soup_suite(const GraphModel& g, double alpha, const SuiteConfig& cfg, TrivialMode mode,
                      double eps) {
  char title[128];
  std::snprintf(title, sizeof title, "soup laws, alpha=%g", alpha);
  Report r(title, cfg.thresholds);
  const PotentialBundle b(g);
  const auto n = g.size();
  const Matrix& G = b.green();
  const Vector& lam = g.lambda();
  SoupOptions opt;
  opt.alpha = alpha;
  opt.mode = mode;
  opt.eps = eps;
  const SoupSampler sampler(b, opt);
  const bool pair = n >= 2;
  const NodeIndex X = 0, Y = 1;

  Observables obs;
  // occupation moments
  std::vector<std::array<std::size_t, 4>> mom(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (unsigned m = 1; m <= 4; ++m) {
      mom[x][m - 1] = obs.add("E(L^" + nm(g, x) + ")^" + std::to_string(m) + " gamma moment",
                              std::pow(G(x, x), m) * rising_factorial(alpha, m));
    }
  }
  std::vector<std::size_t> centered_sq(n);
  for (std::size_t x = 0; x < n; ++x) {
    centered_sq[x] = obs.add("E(L~^" + nm(g, x) + ")^2 = alpha G^2", alpha * G(x, x) * G(x, x));
  }
  std::size_t full_pair = 0, centered_pair = 0, mlt2 = 0, mlt3 = 0, tvar = 0;
  if (pair) {
    full_pair = obs.add("E(L^x L^y) = Per_alpha", moment_prediction(b, alpha, {X, Y}, MomentKind::Full).value);
    centered_pair =
        obs.add("E(L~^x L~^y) = Per0_alpha", moment_prediction(b, alpha, {X, Y}, MomentKind::Centered).value);
    mlt2 = obs.add("sum_loops l^{x,y} = alpha G^{xy}^2", alpha * cyclic_green_product(b, {X, Y}));
  }
  if (n >= 3) mlt3 = obs.add("sum_loops l^{x,y,z} = alpha cyclic G product", alpha * cyclic_green_product(b, {0, 1, 2}));
  const bool edge01 = pair && g.has_edge(X, Y);
  if (edge01) {
    tvar = obs.add("sum T_{x,y} = alpha (G^xx + G^yy - 2 G^xy)", alpha * mu_energy_variation_t(b, X, Y));
  }
  // Laplace functionals
  const auto chis = test_chis(n, cfg.seed);
  std::vector<std::size_t> lap;
  for (std::size_t i = 0; i < chis.size(); ++i) {
    lap.push_back(obs.add("E exp(-<L,chi#" + std::to_string(i + 1) + ">) = (det G_chi/det G)^alpha",
                          std::exp(alpha * mu_laplace(b, chis[i]))));
  }
  std::size_t lap2 = 0;
  Vector chi2 = Vector::Zero(n);
  if (pair) {
    chi2(X) = 1.0;
    chi2(Y) = 1.0;
    const double s = G(X, X), t = G(Y, Y), c = G(X, Y);
    lap2 = obs.add("two-point Laplace at (1,1)", std::pow((1.0 + s) * (1.0 + t) - c * c, -alpha));
  }
  // counts and avoidance
  const std::size_t n_loops = obs.add("mean nontrivial loop count = alpha mu(p>1)", alpha * nontrivial_mass(b));
  const std::size_t n_jumps = obs.add("mean jump count = alpha Tr(GC)", alpha * expected_jump_count(b));
  const std::size_t no_loop = obs.add("P(no nontrivial loop) = det(I-P)^alpha", std::exp(alpha * b.log_det_i_minus_p()));
  const std::size_t avoid_x = obs.add("P(no loop visits x) = (lambda_x G^xx)^-alpha", avoidance_probability(b, {X}, alpha));
  std::size_t avoid_xy = 0;
  if (pair) avoid_xy = obs.add("P(no loop visits x and y)", avoidance_two_sets(b, {X}, {Y}, alpha));
  // visit counts
  constexpr std::size_t kBins = 7;  // 0..5 and tail
  std::vector<std::size_t> nb_hist(n);
  for (std::size_t x = 0; x < n; ++x) nb_hist[x] = obs.add_block(kBins);
  const double qx = 1.0 / (lam(X) * G(X, X));
  const std::array<double, 3> svals = {0.3, 0.6, 0.9};
  std::array<std::size_t, 3> gf{}, gf_printed{};
  const bool alpha_is_one = alpha == 1.0;
  for (std::size_t i = 0; i < svals.size(); ++i) {
    const double s = svals[i];
    const double target = std::pow(qx * s / (1.0 - (1.0 - qx) * s), alpha);
    gf[i] = obs.add("E s^(N_x + alpha) at s=" + std::to_string(s).substr(0, 3), target);
    if (!alpha_is_one) gf_printed[i] = obs.add_block(1);
  }
  const std::size_t cond = obs.add("E[(e^{-<L,chi>} - prod (lambda/(lambda+chi))^(N+alpha)) 1{N_x<=2}] = 0", 0.0);
  // permanental orthogonality
  std::array<std::array<std::size_t, 3>, 3> orth{};
  std::array<std::size_t, 3> qmean{};
  for (unsigned k = 1; k <= 3; ++k) {
    qmean[k - 1] = obs.add("E Q_" + std::to_string(k) + "(L~^x) = 0", 0.0);
  }
  if (pair) {
    for (unsigned k = 1; k <= 3; ++k) {
      for (unsigned l = 1; l <= 3; ++l) {
        const double target =
            k == l ? std::pow(G(X, Y), 2.0 * k) * rising_factorial(alpha, k) / std::tgamma(k + 1.0) : 0.0;
        orth[k - 1][l - 1] =
            obs.add("E Q_" + std::to_string(k) + "(L~^x) Q_" + std::to_string(l) + "(L~^y)", target);
      }
    }
  }
  // current
  const Current omega = cycle_current(g, M_PI / 3.0);
  const double cur_target = std::exp(alpha * current_log_functional(b, omega));
  const std::size_t cur_cos = obs.add("E cos(sum omega N) = (Z_omega/Z)^alpha", cur_target);
  const std::size_t cur_sin = obs.add("E sin(sum omega N) = 0", 0.0);
  // energy change
  const Vector h = default_h(b);
  const GraphModel gh = h_transform(g, h);
  const std::size_t rn = obs.add("E exp(rn exponent) = (Z'/Z)^alpha", std::exp(alpha * energy_change_log(b, gh)));
  // resolved one-point loops
  std::size_t resolved = 0;
  if (mode == TrivialMode::Resolved) {
    resolved = obs.add("one-point loops above eps at x = alpha E1(lambda eps)",
                       expected_resolved_trivial(b, alpha, X, eps));
  }
  // discrete classes
  std::vector<WeightedLoopClass> classes;
  {
    std::size_t kenum = 8;
    for (;;) {
      try {
        classes = enumerate_discrete_loops(b, kenum, 2e5);
        break;
      } catch (const ResourceLimit&) {
        if (--kenum < 2) break;
      }
    }
    std::vector<WeightedLoopClass> kept;
    for (const auto& c : classes) {
      if (c.weight * alpha * static_cast<double>(cfg.samples) >= 5.0) kept.push_back(c);
    }
    classes = std::move(kept);
  }
  std::map<std::vector<NodeIndex>, std::size_t> class_index;
  for (std::size_t i = 0; i < classes.size(); ++i) class_index[classes[i].loop.cycle()] = i;
  const std::size_t class_hist = obs.add_block(classes.size());
  const std::size_t max_abs_current = obs.add_block(1);

  const Vector chi_c = chis[0] + chis[1];
  auto stats = run_replicas(
      cfg.seed, kTagSoup, cfg.samples, obs.size(),
      [&](RandomStream& rng, std::span<double> o) {
        const LoopSoup soup = sampler.sample(rng);
        const Vector L = soup.occupation();
        const Vector Lc = L - alpha * G.diagonal();
        const auto N = soup.visit_counts();
        for (std::size_t x = 0; x < n; ++x) {
          double p = 1.0;
          for (unsigned m = 0; m < 4; ++m) o[mom[x][m]] = (p *= L(x));
          o[centered_sq[x]] = Lc(x) * Lc(x);
          o[nb_hist[x] + std::min<std::uint64_t>(N[x], kBins - 1)] = 1.0;
        }
        if (pair) {
          o[full_pair] = L(X) * L(Y);
          o[centered_pair] = Lc(X) * Lc(Y);
          o[lap2] = std::exp(-L.dot(chi2));
        }
        for (std::size_t i = 0; i < chis.size(); ++i) o[lap[i]] = std::exp(-L.dot(chis[i]));
        o[n_loops] = static_cast<double>(soup.loops.size());
        double jumps = 0.0, mxy = 0.0, m3 = 0.0, cur = 0.0, rn_sum = 0.0;
        bool visits_x = false, visits_xy = false;
        for (const auto& l : soup.loops) {
          jumps += static_cast<double>(l.length());
          const bool vx = std::find(l.visits.begin(), l.visits.end(), X) != l.visits.end();
          const bool vy = pair && std::find(l.visits.begin(), l.visits.end(), Y) != l.visits.end();
          visits_x |= vx;
          visits_xy |= vx && vy;
          if (pair && vx && vy) mxy += loop_multiple_local_time(l, {X, Y});
          if (n >= 3) m3 += loop_multiple_local_time(l, {0, 1, 2});
          cur += current_sum(l, omega);
          rn_sum += rn_exponent(g, gh, l);
          auto it = class_index.find(canonical_rotation(l.visits));
          if (it != class_index.end()) o[class_hist + it->second] += 1.0;
        }
        o[n_jumps] = jumps;
        o[no_loop] = soup.loops.empty() ? 1.0 : 0.0;
        o[avoid_x] = visits_x ? 0.0 : 1.0;
        if (pair) {
          o[avoid_xy] = visits_xy ? 0.0 : 1.0;
          o[mlt2] = mxy;
        }
        if (n >= 3) o[mlt3] = m3;
        if (edge01) {
          const Matrix T = soup.traversals();
          o[tvar] = L(X) + L(Y) - (T(X, Y) + T(Y, X)) / g.conductance(X, Y);
        }
        for (std::size_t i = 0; i < svals.size(); ++i) {
          const double nx = static_cast<double>(N[X]);
          o[gf[i]] = std::pow(svals[i], nx + alpha);
          if (!alpha_is_one) o[gf_printed[i]] = std::pow(svals[i], nx + 1.0);
        }
        {
          double prod = 1.0;
          for (std::size_t x = 0; x < n; ++x) {
            prod *= std::pow(lam(x) / (lam(x) + chi_c(x)), static_cast<double>(N[x]) + alpha);
          }
          o[cond] = N[X] <= 2 ? std::exp(-L.dot(chi_c)) - prod : 0.0;
        }
        for (unsigned k = 1; k <= 3; ++k) {
          const double qx_k = qk_poly(k, alpha, G(X, X), Lc(X));
          o[qmean[k - 1]] = qx_k;
          if (pair) {
            for (unsigned l = 1; l <= 3; ++l) o[orth[k - 1][l - 1]] = qx_k * qk_poly(l, alpha, G(Y, Y), Lc(Y));
          }
        }
        o[cur_cos] = std::cos(cur);
        o[cur_sin] = std::sin(cur);
        o[max_abs_current] = std::abs(cur);
        // one-point loops contribute only through the lambda term
        rn_sum += rn_exponent_trivial(g, gh, L - soup.nontrivial_occupation());
        o[rn] = std::exp(rn_sum);
        if (mode == TrivialMode::Resolved) {
          double c = 0.0;
          for (const auto& t : soup.trivial_loops) c += t.node == X ? 1.0 : 0.0;
          o[resolved] = c;
        }
      },
      cfg.threads);

  obs.report(r, stats, cfg.seed);
  const double nsamp = static_cast<double>(cfg.samples);
  // negative binomial visit counts
  for (std::size_t x = 0; x < n; ++x) {
    auto o = counts(stats, nb_hist[x], kBins);
    const double q = 1.0 / (lam(x) * G(x, x));
    std::vector<double> p(kBins);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < kBins; ++k) acc += (p[k] = negbinom_pmf(alpha, q, k));
    p[kBins - 1] = std::max(0.0, 1.0 - acc);
    merge_small_bins(o, p, nsamp);
    add_frequency_test(r, "N_" + nm(g, x) + " negative binomial pmf (bins 0-5, tail)", o, p, cfg.samples,
              cfg.seed);
  }
  if (!alpha_is_one) {
    for (std::size_t i = 0; i < svals.size(); ++i) {
      const double s = svals[i];
      r.add_discriminating("printed form E s^(N_x+1) rejected at s=" + std::to_string(s).substr(0, 3),
                           stats[gf_printed[i]], std::pow(qx * s / (1.0 - (1.0 - qx) * s), alpha), cfg.seed);
    }
  }
  // current invariance on tree-like graphs: the sum vanishes identically
  // when no edge carries a cycle through the current.
  if (n == 2) r.add_exact("current sum identically 0 on a single edge", stats[max_abs_current].mean(), 0.0);
  // class frequencies
  if (!classes.empty()) {
    auto o = counts(stats, class_hist, classes.size());
    const double total_loops = std::round(stats[n_loops].sum());
    std::vector<double> p;
    double acc_o = 0.0, acc_p = 0.0;
    const double mass = nontrivial_mass(b);
    for (std::size_t i = 0; i < classes.size(); ++i) {
      p.push_back(classes[i].weight / mass);
      acc_o += o[i];
      acc_p += p.back();
    }
    o.push_back(total_loops - acc_o);
    p.push_back(std::max(0.0, 1.0 - acc_p));
    merge_small_bins(o, p, total_loops);
    add_frequency_test(r, "discrete loop class frequencies vs enumeration", o, p,
              static_cast<std::uint64_t>(total_loops), cfg.seed);
  }

  // occupation restricted to F against a soup of the traced chain on F
  if (n >= 2) {
    NodeSet f((n + 1) / 2);
    std::iota(f.begin(), f.end(), 0);
    const auto tm = trace_model(b, f);
    const PotentialBundle tb(tm.traced);
    const SoupSampler ts(tb, SoupOptions{alpha, TrivialMode::Aggregate, 0.0, SoupEngine::Auto});
    const auto m = f.size();
    Observables tobs;
    std::vector<std::size_t> mean_idx(m);
    std::vector<std::vector<std::size_t>> cov_idx(m, std::vector<std::size_t>(m));
    for (std::size_t i = 0; i < m; ++i) {
      mean_idx[i] = tobs.add("traced soup E L^" + nm(g, f[i]) + " = alpha G^xx", alpha * G(f[i], f[i]));
      for (std::size_t j = i; j < m; ++j) {
        cov_idx[i][j] = tobs.add("traced soup cov(L^" + nm(g, f[i]) + ", L^" + nm(g, f[j]) + ") = alpha G^2",
                                 alpha * G(f[i], f[j]) * G(f[i], f[j]));
      }
    }
    const Vector sig = tb.green().diagonal();
    auto ts_stats = run_replicas(
        cfg.seed, kTagTrace, cfg.samples, tobs.size(),
        [&](RandomStream& rng, std::span<double> o) {
          const Vector L = ts.sample(rng).occupation();
          const Vector Lc = L - alpha * sig;
          for (std::size_t i = 0; i < m; ++i) {
            o[mean_idx[i]] = L(i);
            for (std::size_t j = i; j < m; ++j) o[cov_idx[i][j]] = Lc(i) * Lc(j);
          }
        },
        cfg.threads);
    tobs.report(r, ts_stats, cfg.seed);
  }
  return r;
}

Report run_zeta_suite(const GraphModel& g, double alpha, const SuiteConfig& cfg) {
  if (!(alpha > 1.0)) throw ValidationError("zeta identity needs alpha > 1");
  char title[128];
  std::snprintf(title, sizeof title, "zeta identity, alpha=%g", alpha);
  Report r(title, cfg.thresholds);
  const PotentialBundle b(g);
  const auto n = g.size();
  const SoupSampler sampler(b, SoupOptions{alpha, TrivialMode::Aggregate, 0.0, SoupEngine::Auto});
  Observables obs;
  for (std::size_t x = 0; x < n; ++x) obs.add("E 1/(1 - exp(-L^" + nm(g, x) + "/G^xx)) = zeta(alpha)", zeta(alpha));
  const Vector sig = b.green().diagonal();
  auto stats = run_replicas(
      cfg.seed, kTagZeta, cfg.samples, obs.size(),
      [&](RandomStream& rng, std::span<double> o) {
        const Vector L = sampler.sample(rng).occupation();
        for (std::size_t x = 0; x < n; ++x) o[x] = 1.0 / -std::expm1(-L(x) / sig(x));
      },
      cfg.threads);
  obs.report(r, stats, cfg.seed);
  return r;
}

// ---------------------------------------------------------------------------
// Free field

Report dynkin_moment_report(const PotentialBundle& b, unsigned k, const SuiteConfig& cfg) {
  if (cfg.samples == 0) throw ValidationError("dynkin_moment_report: no samples");
  if (k == 0) throw ValidationError("dynkin_moment_report: k must be positive");
  const auto& g = b.model();
  const auto n = b.size();
  const Matrix& G = b.green();
  const double alpha = 0.5 * k;
  Report r("isomorphism moments, k=" + std::to_string(k), cfg.thresholds);
  const SoupSampler sampler(b, SoupOptions{alpha, TrivialMode::Aggregate, 0.0, SoupEngine::Auto});
  const FieldSampler field(b);
  const auto chis = test_chis(n, cfg.seed);

  for (int side = 0; side < 2; ++side) {
    const std::string who = side == 0 ? "soup L_{k/2}" : "field sum phi^2/2";
    Observables obs;
    std::vector<std::array<std::size_t, 4>> mom(n);
    for (std::size_t x = 0; x < n; ++x) {
      for (unsigned m = 1; m <= 4; ++m) {
        mom[x][m - 1] = obs.add(who + " moment " + std::to_string(m) + " at " + nm(g, x),
                                std::pow(G(x, x), m) * rising_factorial(alpha, m));
      }
    }
    std::size_t cross = 0;
    if (n >= 2) cross = obs.add(who + " E(L^x L^y)", moment_prediction(b, alpha, {0, 1}, MomentKind::Full).value);
    std::vector<std::size_t> lap;
    for (std::size_t i = 0; i < chis.size(); ++i) {
      lap.push_back(obs.add(who + " Laplace at chi#" + std::to_string(i + 1), std::exp(alpha * mu_laplace(b, chis[i]))));
    }
    auto stats = run_replicas(
        cfg.seed, side == 0 ? kTagDynkinSoup : kTagDynkinField, cfg.samples, obs.size(),
        [&](RandomStream& rng, std::span<double> o) {
          const Vector L = side == 0 ? sampler.sample(rng).occupation() : field.sample(k, rng).half_square_sum();
          for (std::size_t x = 0; x < n; ++x) {
            double p = 1.0;
            for (unsigned m = 0; m < 4; ++m) o[mom[x][m]] = (p *= L(x));
          }
          if (n >= 2) o[cross] = L(0) * L(1);
          for (std::size_t i = 0; i < chis.size(); ++i) o[lap[i]] = std::exp(-L.dot(chis[i]));
        },
        cfg.threads);
    obs.report(r, stats, cfg.seed);
  }

  // Two-sample KS at every node.
  const std::uint64_t m = std::min<std::uint64_t>(cfg.samples, 10000);
  std::vector<std::vector<double>> a(n), c(n);
  const RandomStream ra(cfg.seed, mix64(kTagKsSoup)), rc(cfg.seed, mix64(kTagKsField));
  for (std::uint64_t i = 0; i < m; ++i) {
    RandomStream s1 = ra.substream(i), s2 = rc.substream(i);
    const Vector L = sampler.sample(s1).occupation();
    const Vector F = field.sample(k, s2).half_square_sum();
    for (std::size_t x = 0; x < n; ++x) {
      a[x].push_back(L(x));
      c[x].push_back(F(x));
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    const auto ks = ks_two_sample(a[x], c[x]);
    r.add_gof("KS L_{k/2}^" + nm(g, x) + " vs sum phi^2/2", ks, m, cfg.seed);
    r.add_check("KS distance at " + nm(g, x) + " below the 0.001 critical value",
                ks.statistic < ks_critical_001(m, m));
  }
  return r;
}

Report dynkin_bridge_report(const PotentialBundle& b, NodeIndex x, NodeIndex y, const Vector& chi,
                            const SuiteConfig& cfg) {
  if (cfg.samples == 0) throw ValidationError("dynkin_bridge_report: no samples");
  const auto& g = b.model();
  const auto n = b.size();
  if (x >= n || y >= n) throw ValidationError("dynkin_bridge_report: node out of range");
  Report r("isomorphism with a bridge, " + nm(g, x) + "->" + nm(g, y), cfg.thresholds);
  const Matrix gc = green_chi(b, chi);
  const double closed = gc(x, y) * std::exp(0.5 * mu_laplace(b, chi));
  const double gxy = b.green(x, y);
  const FieldSampler field(b);
  const BridgeSampler bridge(b, y);

  auto left = run_replicas(
      cfg.seed, kTagBridgeField, cfg.samples, 1,
      [&](RandomStream& rng, std::span<double> o) {
        const Vector phi = field.sample(rng);
        o[0] = phi(x) * phi(y) * std::exp(-0.5 * phi.cwiseAbs2().dot(chi));
      },
      cfg.threads);
  r.add_statistical("E phi^x phi^y exp(-<phi^2/2, chi>) = closed form", left[0], closed, cfg.seed);

  for (int variant = 0; variant < 2; ++variant) {
    const double alpha = variant == 0 ? 0.5 : 1.0;
    const SoupSampler sampler(b, SoupOptions{alpha, TrivialMode::Aggregate, 0.0, SoupEngine::Auto});
    auto right = run_replicas(
        cfg.seed, variant == 0 ? kTagBridgeRight : kTagBridgeWrong, cfg.samples, 1,
        [&](RandomStream& rng, std::span<double> o) {
          const Vector L = sampler.sample(rng).occupation();
          const Path p = bridge.sample(x, rng);
          o[0] = gxy * std::exp(-(L + p.occupation(n)).dot(chi));
        },
        cfg.threads);
    if (variant == 0) {
      r.add_statistical("G^xy E exp(-<L_{1/2} + bridge, chi>) = closed form", right[0], closed, cfg.seed);
    } else {
      r.add_discriminating("intensity 1 variant G^xy E exp(-<L_1 + bridge, chi>) rejected", right[0], closed,
                           cfg.seed);
    }
  }
  return r;
}

Report renormalized_vs_wick_report(const PotentialBundle& b, unsigned k, unsigned n_max,
                                   const SuiteConfig& cfg) {
  if (cfg.samples == 0) throw ValidationError("renormalized_vs_wick_report: no samples");
  const auto n = b.size();
  const Matrix& G = b.green();
  const double alpha = 0.5 * k;
  Report r("renormalized powers vs Wick powers, k=" + std::to_string(k), cfg.thresholds);
  const SoupSampler sampler(b, SoupOptions{alpha, TrivialMode::Aggregate, 0.0, SoupEngine::Auto});
  const FieldSampler field(b);
  const bool pair = n >= 2;
  for (int side = 0; side < 2; ++side) {
    const std::string who = side == 0 ? "soup Q_n(L~)" : "field :(sum phi^2)^n:/(2^n n!)";
    Observables obs;
    std::vector<std::size_t> mean(n_max + 1), cov(n_max + 1), var(n_max + 1);
    for (unsigned m = 0; m <= n_max; ++m) {
      mean[m] = obs.add(who + " mean, n=" + std::to_string(m), m == 0 ? 1.0 : 0.0);
      var[m] = obs.add(who + " second moment at x, n=" + std::to_string(m),
                       std::pow(G(0, 0), 2.0 * m) * rising_factorial(alpha, m) / std::tgamma(m + 1.0));
      if (pair) {
        cov[m] = obs.add(who + " E(.^x .^y), n=" + std::to_string(m),
                         std::pow(G(0, 1), 2.0 * m) * rising_factorial(alpha, m) / std::tgamma(m + 1.0));
      }
    }
    auto stats = run_replicas(
        cfg.seed, side == 0 ? kTagWickSoup : kTagWickField, cfg.samples, obs.size(),
        [&](RandomStream& rng, std::span<double> o) {
          std::vector<double> vx, vy;
          if (side == 0) {
            const Vector Lc = centered_occupation(sampler.sample(rng), b);
            for (unsigned m = 0; m <= n_max; ++m) {
              const double a = qk_poly(m, alpha, G(0, 0), Lc(0));
              o[mean[m]] = a;
              o[var[m]] = a * a;
              if (pair) o[cov[m]] = a * qk_poly(m, alpha, G(1, 1), Lc(1));
            }
          } else {
            const FieldSample fs = field.sample(k, rng);
            for (const auto& c : fs.copies) {
              vx.push_back(c(0));
              if (pair) vy.push_back(c(1));
            }
            for (unsigned m = 0; m <= n_max; ++m) {
              const double a = wick_sum_square_power(vx, G(0, 0), m);
              o[mean[m]] = a;
              o[var[m]] = a * a;
              if (pair) o[cov[m]] = a * wick_sum_square_power(vy, G(1, 1), m);
            }
          }
        },
        cfg.threads);
    obs.report(r, stats, cfg.seed);
  }
  return r;
}

Report run_gff_suite(const GraphModel& g, const SuiteConfig& cfg) {
  const PotentialBundle b(g);
  const auto n = g.size();
  const Matrix& G = b.green();
  Report r("free field and isomorphism", cfg.thresholds);
  const FieldSampler field(b);
  Observables obs;
  std::vector<std::vector<std::size_t>> cov(n, std::vector<std::size_t>(n));
  std::vector<std::size_t> mean(n);
  for (std::size_t x = 0; x < n; ++x) {
    mean[x] = obs.add("E phi^" + nm(g, x) + " = 0", 0.0);
    for (std::size_t y = x; y < n; ++y) {
      cov[x][y] = obs.add("E phi^" + nm(g, x) + " phi^" + nm(g, y) + " = G", G(x, y));
    }
  }
  std::size_t wick2 = 0, half_exp = 0;
  if (n >= 2) wick2 = obs.add("E :phi^2:(x) :phi^2:(y) = 2 G^xy^2", 2.0 * G(0, 1) * G(0, 1));
  half_exp = obs.add("k=2: E (phi_1^2+phi_2^2)/2 at x = G^xx", G(0, 0));
  auto stats = run_replicas(
      cfg.seed, kTagFieldCov, cfg.samples, obs.size(),
      [&](RandomStream& rng, std::span<double> o) {
        const Vector phi = field.sample(rng);
        const Vector phi2 = field.sample(rng);
        for (std::size_t x = 0; x < n; ++x) {
          o[mean[x]] = phi(x);
          for (std::size_t y = x; y < n; ++y) o[cov[x][y]] = phi(x) * phi(y);
        }
        if (n >= 2) o[wick2] = wick_power(phi(0), G(0, 0), 2) * wick_power(phi(1), G(1, 1), 2);
        o[half_exp] = 0.5 * (phi(0) * phi(0) + phi2(0) * phi2(0));
      },
      cfg.threads);
  obs.report(r, stats, cfg.seed);
  for (unsigned k = 1; k <= 2; ++k) r.append(dynkin_moment_report(b, k, cfg));
  if (n >= 2) {
    r.append(dynkin_bridge_report(b, 0, 1, test_chis(n, cfg.seed)[0], cfg));
  }
  // n = 3 products are heavy tailed enough that a 1e5-sample z-score is
  // unreliable, so the sampled comparison stops at n = 2
  for (unsigned k = 1; k <= 2; ++k) r.append(renormalized_vs_wick_report(b, k, 2, cfg));
  return r;
}

// ---------------------------------------------------------------------------
// Wilson

namespace {

void self_avoiding_paths(const GraphModel& g, std::vector<NodeIndex>& cur, std::vector<char>& used,
                         std::vector<std::vector<NodeIndex>>& out) {
  const NodeIndex last = cur.back();
  if (g.killing()(last) > 0.0) out.push_back(cur);
  for (auto w : g.neighbors(last)) {
    if (used[w]) continue;
    used[w] = 1;
    cur.push_back(w);
    self_avoiding_paths(g, cur, used, out);
    cur.pop_back();
    used[w] = 0;
  }
}

}  // namespace

Report run_wilson_suite(const GraphModel& g, const SuiteConfig& cfg) {
  const PotentialBundle b(g);
  const auto n = g.size();
  if (n > 8) throw ResourceLimit("run_wilson_suite: at most 8 nodes");
  const Matrix& G = b.green();
  Report r("Wilson algorithm and loop erasure", cfg.thresholds);
  const auto trees = enumerate_spanning_trees(b);
  std::map<SpanningTree, std::size_t> tree_index;
  for (std::size_t i = 0; i < trees.size(); ++i) tree_index[trees[i].tree] = i;

  // edges as oriented pairs
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  for (std::size_t x = 0; x < n; ++x) {
    for (auto y : g.neighbors(x)) edges.emplace_back(x, y);
  }
  const Vector h = default_h(b);
  const GraphModel gh = h_transform(g, h);
  const double rel_target = std::exp(b.log_z_e() - PotentialBundle(gh).log_z_e());
  const std::size_t top_trees = std::min<std::size_t>(3, trees.size());
  const double mean_n_total = (G.cwiseProduct(g.conductance())).sum();

  // Network observables shared by the Wilson and soup runs.
  auto network_obs = [&](Observables& obs) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < 2 * (edges.size() + n); ++i) idx.push_back(obs.add({}, 0.0));
    return idx;
  };
  auto fill_network = [&](std::span<double> o, const std::vector<std::size_t>& idx, const Matrix& T,
                          const Vector& occ) {
    std::size_t k = 0;
    for (const auto& [x, y] : edges) {
      o[idx[k++]] = T(x, y);
      o[idx[k++]] = T(x, y) * T(x, y);
    }
    for (std::size_t x = 0; x < n; ++x) {
      o[idx[k++]] = occ(x);
      o[idx[k++]] = occ(x) * occ(x);
    }
  };

  Observables wobs;
  const std::size_t tree_hist = wobs.add_block(trees.size());
  const auto wnet = network_obs(wobs);
  std::vector<std::size_t> indep(top_trees);
  for (std::size_t i = 0; i < top_trees; ++i) {
    indep[i] = wobs.add("E[(sum N - mean) 1{tree = #" + std::to_string(i + 1) + "}] = 0", 0.0);
  }
  for (const auto& [x, y] : edges) {
    wobs.add("Wilson E N_{" + nm(g, x) + "," + nm(g, y) + "} = G^xy C_xy", G(x, y) * g.conductance(x, y));
  }
  const std::size_t mean_n_first = wobs.size() - edges.size();
  for (std::size_t x = 0; x < n; ++x) wobs.add("Wilson E occupation at " + nm(g, x) + " = G^xx", G(x, x));
  const std::size_t rel = wobs.add("E over trees prod(C'/C) prod(kappa'/kappa) = Z_e/Z_e'", rel_target);

  const std::vector<NodeIndex> identity;
  auto wilson_run = [&](std::uint64_t tag, const std::vector<NodeIndex>& order, Observables& obs, bool full) {
    return run_replicas(
        cfg.seed, tag, cfg.samples, obs.size(),
        [&](RandomStream& rng, std::span<double> o) {
          const WilsonResult w = wilson_sample(b, rng, order);
          const auto it = tree_index.find(w.tree);
          const std::size_t ti = it == tree_index.end() ? trees.size() : it->second;
          if (ti < trees.size()) o[tree_hist + ti] = 1.0;
          if (!full) return;
          const auto net = network_summary(w.erased, n);
          fill_network(o, wnet, net.traversals, w.occupation);
          const double total = net.traversals.sum();
          for (std::size_t i = 0; i < top_trees; ++i) o[indep[i]] = ti == i ? total - mean_n_total : 0.0;
          for (std::size_t e = 0; e < edges.size(); ++e) {
            o[mean_n_first + e] = net.traversals(edges[e].first, edges[e].second);
          }
          for (std::size_t x = 0; x < n; ++x) o[mean_n_first + edges.size() + x] = w.occupation(x);
          double ratio = 1.0;
          for (std::size_t x = 0; x < n; ++x) {
            const auto p = w.tree.parent[x];
            ratio *= p == kCemetery ? gh.killing()(x) / g.killing()(x) : gh.conductance(x, p) / g.conductance(x, p);
          }
          o[rel] = ratio;
        },
        cfg.threads);
  };
  auto wstats = wilson_run(kTagWilson, identity, wobs, true);
  wobs.report(r, wstats, cfg.seed);

  std::vector<double> tree_p;
  for (const auto& t : trees) tree_p.push_back(t.weight);
  {
    auto o = counts(wstats, tree_hist, trees.size());
    add_frequency_test(r, "tree frequencies vs Z_e prod C (node order)", o, tree_p, cfg.samples, cfg.seed);
  }
  {
    std::vector<NodeIndex> rev(n);
    std::iota(rev.rbegin(), rev.rend(), 0);
    Observables robs;
    robs.add_block(trees.size());
    auto rstats = wilson_run(kTagWilsonReverse, rev, robs, false);
    auto o = counts(rstats, 0, trees.size());
    add_frequency_test(r, "tree frequencies vs Z_e prod C (reversed order)", o, tree_p, cfg.samples, cfg.seed);
  }

  // Erased network against an alpha = 1 soup: difference of means.
  {
    const SoupSampler sampler(b, SoupOptions{1.0, TrivialMode::Aggregate, 0.0, SoupEngine::Auto});
    Observables sobs;
    const auto snet = network_obs(sobs);
    auto sstats = run_replicas(
        cfg.seed, kTagWilsonSoup, cfg.samples, sobs.size(),
        [&](RandomStream& rng, std::span<double> o) {
          const LoopSoup soup = sampler.sample(rng);
          fill_network(o, snet, soup.traversals(), soup.occupation());
        },
        cfg.threads);
    std::size_t k = 0;
    auto compare = [&](const std::string& name) {
      const auto& a = wstats[wnet[k]];
      const auto& s = sstats[snet[k]];
      ++k;
      r.add_statistical("Wilson vs soup: " + name, a.mean() - s.mean(),
                        std::sqrt(a.std_error() * a.std_error() + s.std_error() * s.std_error()), 0.0,
                        cfg.samples, cfg.seed);
    };
    for (const auto& [x, y] : edges) {
      const std::string e = "N_{" + nm(g, x) + "," + nm(g, y) + "}";
      compare("E " + e);
      compare("E " + e + "^2");
    }
    for (std::size_t x = 0; x < n; ++x) {
      compare("E occupation " + nm(g, x));
      compare("E occupation " + nm(g, x) + "^2");
    }
  }

  // Loop-erasure law of killed paths from node 0.
  {
    std::vector<std::vector<NodeIndex>> paths;
    std::vector<NodeIndex> cur{0};
    std::vector<char> used(n, 0);
    used[0] = 1;
    self_avoiding_paths(g, cur, used, paths);
    std::sort(paths.begin(), paths.end());
    std::map<std::vector<NodeIndex>, std::size_t> pidx;
    std::vector<double> p;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      pidx[paths[i]] = i;
      p.push_back(be_exact_law(b, 0, kCemetery, paths[i]));
    }
    auto stats = run_replicas(
        cfg.seed, kTagErasure, cfg.samples, paths.size(),
        [&](RandomStream& rng, std::span<double> o) {
          const auto er = loop_erase(sample_killed_path(b, 0, rng));
          o[pidx.at(er.skeleton)] = 1.0;
        },
        cfg.threads);
    auto o = counts(stats, 0, paths.size());
    merge_small_bins(o, p, static_cast<double>(cfg.samples));
    add_frequency_test(r, "loop-erased killed path law from " + nm(g, 0), o, p, cfg.samples, cfg.seed);
    for (std::size_t i = 0; i < std::min<std::size_t>(paths.size(), 4); ++i) {
      std::string name = "P(erased path = (";
      for (std::size_t j = 0; j < paths[i].size(); ++j) name += (j ? "," : "") + nm(g, paths[i][j]);
      r.add_statistical(name + "))", stats[i], be_exact_law(b, 0, kCemetery, paths[i]), cfg.seed);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Branching with immigration on PN(N)

Report run_branching_demo(std::size_t big_n, double alpha, const SuiteConfig& cfg) {
  if (big_n < 8) throw ValidationError("branching demo needs N >= 8");
  Report r("branching with immigration on PN(" + std::to_string(big_n) + ")", cfg.thresholds);
  GraphSpec spec;
  for (std::size_t i = 1; i <= big_n; ++i) spec.nodes.push_back(std::to_string(i));
  for (std::size_t i = 1; i < big_n; ++i) spec.edges.push_back({std::to_string(i), std::to_string(i + 1), 1.0});
  spec.killing["1"] = 1.0;
  const GraphModel g = GraphModel::build(spec);
  const PotentialBundle b(g);
  const Matrix& G = b.green();
  const std::size_t half = big_n / 2;

  {
    double res = 0.0;
    for (std::size_t i = 0; i < big_n; ++i) {
      for (std::size_t j = 0; j < big_n; ++j) {
        res = std::max(res, std::abs(G(i, j) - static_cast<double>(std::min(i, j) + 1)));
      }
    }
    r.add_exact("G^{n,m} = min(n,m) (max relative residual)", res / static_cast<double>(big_n), 0.0);
    double lam_res = 0.0, p_res = 0.0;
    for (std::size_t m = 1; m < big_n; ++m) {
      NodeSet f(m);
      std::iota(f.begin(), f.end(), 0);
      const auto tm = trace_model(b, f);
      lam_res = std::max(lam_res, std::abs(tm.traced.lambda()(m - 1) - 1.0));
      p_res = std::max(p_res, std::abs(tm.return_probability(m - 1) - 0.5));
    }
    r.add_exact("trace on {1..n}: lambda^F_n = 1 (max residual)", lam_res, 0.0);
    r.add_exact("trace on {1..n}: p^F_n = 1/2 (max residual)", p_res, 0.0);
  }

  const SoupSampler sampler(b, SoupOptions{alpha, TrivialMode::Aggregate, 0.0, SoupEngine::Auto});
  Observables obs;
  std::vector<std::size_t> mean_level(half);
  for (std::size_t m = 0; m < half; ++m) {
    mean_level[m] = obs.add("E L^" + std::to_string(m + 1) + " = alpha n", alpha * static_cast<double>(m + 1));
  }
  std::vector<std::size_t> moment_levels = {1, 2, std::max<std::size_t>(1, big_n / 4), half};
  std::sort(moment_levels.begin(), moment_levels.end());
  moment_levels.erase(std::unique(moment_levels.begin(), moment_levels.end()), moment_levels.end());
  std::vector<std::array<std::size_t, 4>> imm(moment_levels.size());
  for (std::size_t i = 0; i < moment_levels.size(); ++i) {
    for (unsigned m = 1; m <= 4; ++m) {
      imm[i][m - 1] = obs.add("immigration at level " + std::to_string(moment_levels[i]) + ": moment " +
                                  std::to_string(m) + " of Gamma(alpha,1)",
                              rising_factorial(alpha, m));
    }
  }
  std::vector<std::size_t> imm_mean(half);
  for (std::size_t m = 0; m < half; ++m) {
    imm_mean[m] = obs.add("immigration mean at level " + std::to_string(m + 1) + " = alpha", alpha);
  }
  constexpr std::size_t kOffBins = 8;  // 0..6 and tail
  const std::size_t off_hist = obs.add_block(kOffBins);

  auto stats = run_replicas(
      cfg.seed, kTagBranching, cfg.samples, obs.size(),
      [&](RandomStream& rng, std::span<double> o) {
        const LoopSoup soup = sampler.sample(rng);
        const Vector L = soup.occupation();
        for (std::size_t m = 0; m < half; ++m) o[mean_level[m]] = L(m);
        // immigration: occupation at n of loops whose lowest node is n,
        // plus the one-point loops at n
        Vector imm_val = soup.trivial_occupation;
        std::vector<std::uint64_t> counter(big_n + 1, 0);
        for (const auto& l : soup.loops) {
          const auto k = l.visits.size();
          std::size_t start = 0;
          for (std::size_t i = 1; i < k; ++i) {
            if (l.visits[i] < l.visits[start]) start = i;
          }
          const NodeIndex low = l.visits[start];
          imm_val(low) += l.occupation(low);
          // offspring: up-steps n -> n+1 made between an up-crossing
          // (n-1 -> n) and the next down-step n -> n-1
          for (std::size_t s = 0; s < k; ++s) {
            const NodeIndex u = l.visits[(start + s) % k];
            const NodeIndex v = l.visits[(start + s + 1) % k];
            if (v == u + 1) {
              if (u > low) ++counter[u];
              counter[v] = 0;
            } else if (u > low) {
              // down step u -> u-1 closes the up-crossing into u
              const std::size_t level = u + 1;  // 1-based
              if (level >= 2 && level <= half) o[off_hist + std::min<std::uint64_t>(counter[u], kOffBins - 1)] += 1.0;
            }
          }
        }
        for (std::size_t i = 0; i < moment_levels.size(); ++i) {
          const double v = imm_val(moment_levels[i] - 1);
          double p = 1.0;
          for (unsigned m = 0; m < 4; ++m) o[imm[i][m]] = (p *= v);
        }
        for (std::size_t m = 0; m < half; ++m) o[imm_mean[m]] = imm_val(m);
      },
      cfg.threads);
  obs.report(r, stats, cfg.seed);
  {
    auto o = counts(stats, off_hist, kOffBins);
    std::vector<double> p(kOffBins);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < kOffBins; ++k) acc += (p[k] = std::ldexp(1.0, -static_cast<int>(k) - 1));
    p[kOffBins - 1] = 1.0 - acc;
    double total = 0.0;
    for (double v : o) total += v;
    add_frequency_test(r, "offspring pmf vs 2^{-k-1}, levels 2.." + std::to_string(half), o, p,
              static_cast<std::uint64_t>(total), cfg.seed);
    r.add_statistical("offspring P(0) = 1/2", o[0] / total, std::sqrt(0.25 / total), 0.5,
                      static_cast<std::uint64_t>(total), cfg.seed);
  }
  return r;
}

}  // namespace loopsoup
