// loopsoup command line tool.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "loopsoup/erasure_wilson.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/experiments.hpp"
#include "loopsoup/graph_io.hpp"
#include "loopsoup/loop_measure.hpp"
#include "loopsoup/loop_soup.hpp"

using namespace loopsoup;

namespace {

struct Options {
  std::string graph;
  double alpha = 1.0;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 42;
  std::string mode = "aggregate";
  double eps = 0.01;
  std::string out;
  double zmax = 4.0;
  unsigned threads = 0;
  std::string from, to;
  std::size_t big_n = 64;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
  }
}

int finish(const Options& o, const Report& r) {
  std::cout << r.table();
  if (!o.out.empty()) write_file(o.out, r.to_json(utc_timestamp()));
  return r.passed() ? 0 : 1;
}

SuiteConfig config(const Options& o) {
  SuiteConfig c;
  c.samples = o.samples;
  c.seed = o.seed;
  c.threads = o.threads;
  c.thresholds.z_max = o.zmax;
  return c;
}

TrivialMode parse_mode(const std::string& m) {
  if (m == "aggregate") return TrivialMode::Aggregate;
  if (m == "resolved") return TrivialMode::Resolved;
  throw ValidationError("--mode must be aggregate or resolved");
}

bool half_integer(double a) { return a > 0.0 && std::abs(2.0 * a - std::round(2.0 * a)) < 1e-12; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov loop soups on finite graphs: exact formulas, samplers and verification suites"};
  app.require_subcommand(1);
  Options o;

  auto add_graph = [&](CLI::App* c) { c->add_option("--graph", o.graph, "graph JSON file")->required(); };
  auto add_stat = [&](CLI::App* c) {
    c->add_option("--samples", o.samples, "number of replicas");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--threads", o.threads, "worker threads (0: all cores)");
    c->add_option("--zmax", o.zmax, "z-score gate");
  };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "output file"); };

  auto* validate = app.add_subcommand("validate", "load and check a graph file");
  add_graph(validate);
  auto* green = app.add_subcommand("green", "Green function as CSV");
  add_graph(green);
  add_out(green);
  auto* vexact = app.add_subcommand("verify-exact", "exact identities");
  add_graph(vexact);
  add_out(vexact);
  auto* soup = app.add_subcommand("soup", "sample one loop soup as JSON lines");
  add_graph(soup);
  add_out(soup);
  soup->add_option("--alpha", o.alpha, "intensity");
  soup->add_option("--seed", o.seed, "random seed");
  soup->add_option("--mode", o.mode, "aggregate|resolved");
  soup->add_option("--eps", o.eps, "one-point loop threshold in resolved mode");
  auto* vsoup = app.add_subcommand("verify-soup", "soup law suite");
  add_graph(vsoup);
  add_stat(vsoup);
  add_out(vsoup);
  vsoup->add_option("--alpha", o.alpha, "intensity");
  vsoup->add_option("--mode", o.mode, "aggregate|resolved");
  vsoup->add_option("--eps", o.eps, "one-point loop threshold in resolved mode");
  auto* vgff = app.add_subcommand("verify-gff", "free field and isomorphism suite");
  add_graph(vgff);
  add_stat(vgff);
  add_out(vgff);
  auto* wilson = app.add_subcommand("wilson", "sample one spanning tree");
  add_graph(wilson);
  add_out(wilson);
  wilson->add_option("--seed", o.seed, "random seed");
  auto* vwilson = app.add_subcommand("verify-wilson", "Wilson and loop-erasure suite");
  add_graph(vwilson);
  add_stat(vwilson);
  add_out(vwilson);
  auto* bridge = app.add_subcommand("bridge", "sample one bridge path");
  add_graph(bridge);
  add_out(bridge);
  bridge->add_option("--from", o.from, "start node")->required();
  bridge->add_option("--to", o.to, "end node")->required();
  bridge->add_option("--seed", o.seed, "random seed");
  auto* branching = app.add_subcommand("branching-demo", "branching with immigration on a path");
  branching->add_option("--n", o.big_n, "path length N (>= 8)");
  branching->add_option("--alpha", o.alpha, "intensity");
  add_stat(branching);
  add_out(branching);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*branching) return finish(o, run_branching_demo(o.big_n, o.alpha, config(o)));

    const GraphModel g = load_graph(o.graph);
    if (*validate) {
      const PotentialBundle b(g);
      std::size_t edges = 0;
      for (std::size_t x = 0; x < g.size(); ++x) edges += g.neighbors(x).size();
      std::printf("ok: %zu nodes, %zu edges, Z_e = %.17g, det(I-P) = %.17g\n", g.size(), edges / 2, b.z_e(),
                  b.det_i_minus_p());
      return 0;
    }
    if (*green) {
      const PotentialBundle b(g);
      emit(o, matrix_to_csv(g.names(), b.green()));
      return 0;
    }
    if (*vexact) return finish(o, run_verify_exact(g, Thresholds{o.zmax}));
    if (*soup) {
      const PotentialBundle b(g);
      RandomStream rng(o.seed, 0);
      const SoupOptions opt{o.alpha, parse_mode(o.mode), o.eps, SoupEngine::Auto};
      emit(o, soup_to_jsonl(g, sample_soup(b, opt, rng), o.seed));
      return 0;
    }
    if (*vsoup) {
      const SuiteConfig cfg = config(o);
      Report r = run_soup_suite(g, o.alpha, cfg, parse_mode(o.mode), o.eps);
      if (half_integer(o.alpha)) {
        r.append(dynkin_moment_report(PotentialBundle(g), static_cast<unsigned>(std::lround(2.0 * o.alpha)), cfg));
      }
      if (o.alpha > 1.0) r.append(run_zeta_suite(g, o.alpha, cfg));
      return finish(o, r);
    }
    if (*vgff) return finish(o, run_gff_suite(g, config(o)));
    if (*wilson) {
      const PotentialBundle b(g);
      RandomStream rng(o.seed, 0);
      emit(o, tree_to_json(g, wilson_sample(b, rng).tree));
      return 0;
    }
    if (*vwilson) return finish(o, run_wilson_suite(g, config(o)));
    if (*bridge) {
      const PotentialBundle b(g);
      RandomStream rng(o.seed, 0);
      const Path p = sample_bridge(b, g.index_of(o.from), g.index_of(o.to), rng);
      nlohmann::json j;
      j["format_version"] = 1;
      auto visits = nlohmann::json::array();
      for (auto x : p.visits) visits.push_back(g.name(x));
      j["visits"] = std::move(visits);
      j["holding"] = p.holding;
      emit(o, j.dump() + "\n");
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
