// Acceptance run: one line per criterion, exit code 0 iff all pass.
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "loopsoup/experiments.hpp"
#include "loopsoup/permanental.hpp"
#include "oracles.hpp"

using namespace loopsoup;
using namespace testing_support;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Criterion {
  bool ok = true;
  std::size_t checked = 0;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    ++checked;
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
  // Every entry whose name contains one of `keys` must pass; at least one
  // must exist per key.
  void entries(const Report& r, const std::string& where, const std::vector<std::string>& keys) {
    for (const auto& key : keys) {
      std::size_t found = 0;
      for (const auto& e : r.entries()) {
        if (e.name.find(key) == std::string::npos) continue;
        ++found;
        char buf[256];
        const auto z = e.z();
        std::snprintf(buf, sizeof buf, "%s: %s (estimate %.6g, z %s, p %s)", where.c_str(), e.name.c_str(), e.estimate,
                      z ? std::to_string(*z).c_str() : "-", e.p_value ? std::to_string(*e.p_value).c_str() : "-");
        require(r.entry_passes(e), buf);
      }
      require(found > 0, where + ": no entry matching '" + key + "'");
    }
  }
  // The target recorded for `key` must equal `value` (checks the oracle
  // wiring, not the sample).
  void target(const Report& r, const std::string& where, const std::string& key, double value) {
    for (const auto& e : r.entries()) {
      if (e.name.find(key) == std::string::npos) continue;
      require(e.exact && std::abs(*e.exact - value) <= 1e-12 * std::max(1.0, std::abs(value)),
              where + ": target of '" + e.name + "' differs from " + std::to_string(value));
      return;
    }
    require(false, where + ": no entry matching '" + key + "'");
  }
};

SuiteConfig cfg(std::uint64_t samples) {
  SuiteConfig c;
  c.samples = samples;
  c.seed = kSeed;
  return c;
}

int report(int id, const std::string& title, const Criterion& c) {
  std::printf("[%s] criterion %d: %s (%zu checks)\n", c.ok ? "PASS" : "FAIL", id, title.c_str(), c.checked);
  for (const auto& n : c.notes) std::printf("       failed: %s\n", n.c_str());
  std::fflush(stdout);
  return c.ok ? 0 : 1;
}

}  // namespace

int main() {
  int failures = 0;
  const auto G2 = g2();
  const auto T3 = t3();
  const auto P3 = p3();

  {
    Criterion c;
    std::vector<std::pair<std::string, GraphModel>> models{{"G2", G2}, {"T3", T3}, {"P3", P3}};
    RandomStream rng(kSeed, 1);
    for (int i = 0; i < 50; ++i) models.emplace_back("random#" + std::to_string(i), random_er_graph(2 + i % 7, rng));
    for (const auto& [name, g] : models) {
      const auto r = run_verify_exact(g);
      for (const auto& f : r.failures()) c.require(false, name + ": " + f);
      c.require(true, name);
    }
    failures += report(1, "exact identities on G2, T3, P3 and 50 random graphs (tol 1e-10)", c);
  }

  std::vector<std::pair<double, Report>> g2_runs, t3_runs;
  for (double alpha : {0.5, 1.0, 2.0}) {
    g2_runs.emplace_back(alpha, run_soup_suite(G2, alpha, cfg(100000)));
    t3_runs.emplace_back(alpha, run_soup_suite(T3, alpha, cfg(100000)));
  }

  {
    Criterion c;
    const std::vector<std::string> keys{"gamma moment", "E exp(-<L,chi#", "negative binomial pmf", "P(no loop visits"};
    for (const auto& [alpha, r] : g2_runs) {
      const std::string where = "G2 alpha=" + std::to_string(alpha);
      c.entries(r, where, keys);
      c.target(r, where, "P(no loop visits x) =", std::pow(0.75, alpha));
      if (alpha == 1.0) c.target(r, where, "P(no loop visits x and y)", 0.75);
    }
    for (const auto& [alpha, r] : t3_runs) c.entries(r, "T3 alpha=" + std::to_string(alpha), keys);
    failures += report(2, "soup laws on G2 and T3, alpha in {0.5,1,2}, 1e5 replicas, |z|<=4, p>0.001", c);
  }

  {
    Criterion c;
    const Report& r = g2_runs[1].second;
    c.entries(r, "G2 alpha=1", {"= Per_alpha", "= Per0_alpha", "E Q_"});
    c.target(r, "G2 alpha=1", "E(L^x L^y) = Per_alpha", 5.0 / 9.0);
    c.target(r, "G2 alpha=1", "E(L~^x L~^y) = Per0_alpha", 1.0 / 9.0);
    RandomStream rng(kSeed, 3);
    for (int i = 0; i < 20; ++i) {
      Matrix a(5, 5);
      for (int x = 0; x < 5; ++x) {
        for (int y = 0; y < 5; ++y) a(x, y) = rng.uniform();
      }
      const double alpha = 0.5 + 1.5 * rng.uniform();
      const double ref = oracle::permanent(to_dense(a), alpha);
      c.require(std::abs(alpha_permanent(a, alpha) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)),
                "alpha_permanent vs brute force, matrix " + std::to_string(i));
    }
    failures += report(3, "permanental moments 5/9 and 1/9, orthogonality k,l<=3, permanent oracle", c);
  }

  {
    Criterion c;
    const auto r = run_zeta_suite(G2, 3.0, cfg(1000000));
    c.entries(r, "G2", {"zeta(alpha)"});
    c.target(r, "G2", "zeta(alpha)", 1.2020569031595942);
    failures += report(4, "zeta identity at alpha=3, 1e6 replicas", c);
  }

  {
    Criterion c;
    for (const auto& [name, g] : std::vector<std::pair<std::string, GraphModel>>{{"G2", G2}, {"T3", T3}}) {
      const auto r = dynkin_moment_report(PotentialBundle(g), 1, cfg(100000));
      c.entries(r, name, {"KS "});
    }
    Vector chi(2);
    chi << 1.0, 0.0;
    const auto br = dynkin_bridge_report(PotentialBundle(G2), 0, 1, chi, cfg(100000));
    c.entries(br, "G2", {"closed form", "intensity 1 variant"});
    c.target(br, "G2", "E phi^x phi^y", 0.2 * std::sqrt(0.6));
    failures += report(5, "isomorphism: KS 1e4 vs 1e4, bridge closed form, intensity-1 variant rejected", c);
  }

  {
    Criterion c;
    for (const auto& [alpha, r] : t3_runs) {
      const std::string where = "T3 alpha=" + std::to_string(alpha);
      c.entries(r, where, {"E cos(sum omega N)", "E sin(sum omega N)"});
      c.target(r, where, "E cos(sum omega N)", std::pow(0.8, alpha));
    }
    for (const auto& [alpha, r] : g2_runs) {
      c.entries(r, "G2 alpha=" + std::to_string(alpha), {"current sum identically 0"});
    }
    failures += report(6, "currents: T3 theta=pi/3 gives (4/5)^alpha, G2 invariance exact", c);
  }

  {
    Criterion c;
    for (const auto& [name, g] : std::vector<std::pair<std::string, GraphModel>>{{"G2", G2}, {"T3", T3}}) {
      const auto r = run_wilson_suite(g, cfg(100000));
      c.entries(r, name, {"tree frequencies", "Wilson vs soup", "loop-erased killed path law"});
      if (name == "G2") {
        c.target(r, name, "P(erased path = (a))", 2.0 / 3.0);
        c.target(r, name, "P(erased path = (a,b))", 1.0 / 3.0);
      }
    }
    failures += report(7, "Wilson tree law, erased network vs soup, loop-erasure law", c);
  }

  {
    Criterion c;
    const auto r = run_branching_demo(64, 1.0, cfg(100000));
    c.entries(r, "PN(64)", {"min(n,m)", "immigration", "offspring", "lambda^F_n = 1", "p^F_n = 1/2", "= alpha n"});
    failures += report(8, "branching with immigration on PN(64), alpha=1, 1e5 replicas", c);
  }

  {
    Criterion c;
    SuiteConfig a = cfg(20000);
    a.threads = 1;
    SuiteConfig b = a;
    b.threads = 4;
    const auto first = run_soup_suite(T3, 1.0, a).payload_json();
    c.require(first == run_soup_suite(T3, 1.0, a).payload_json(), "repeat run differs");
    c.require(first == run_soup_suite(T3, 1.0, b).payload_json(), "thread count changes the payload");
    const auto w = run_wilson_suite(G2, a).payload_json();
    c.require(w == run_wilson_suite(G2, b).payload_json(), "Wilson payload differs");
    failures += report(9, "identical seed gives a byte-identical report payload", c);
  }

  std::printf("%s\n", failures == 0 ? "all criteria pass" : "some criteria fail");
  return failures == 0 ? 0 : 1;
}
