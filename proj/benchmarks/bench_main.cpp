#include <benchmark/benchmark.h>

#include "loopsoup/erasure_wilson.hpp"
#include "loopsoup/graph_io.hpp"
#include "loopsoup/loop_soup.hpp"
#include "loopsoup/permanental.hpp"

using namespace loopsoup;

namespace {

GraphModel path(std::size_t n) { return GraphModel::build(fixture_pn(n)); }

void BM_Philox(benchmark::State& state) {
  RandomStream rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rng());
}
BENCHMARK(BM_Philox);

void BM_Gamma(benchmark::State& state) {
  RandomStream rng(1, 2);
  const double shape = static_cast<double>(state.range(0)) / 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(rng.gamma(shape));
}
BENCHMARK(BM_Gamma)->Arg(1)->Arg(2)->Arg(8);

void BM_Green(benchmark::State& state) {
  const auto g = path(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    PotentialBundle b(g);
    benchmark::DoNotOptimize(b.green()(0, 0));
  }
}
BENCHMARK(BM_Green)->Arg(8)->Arg(64)->Arg(256);

void BM_Soup(benchmark::State& state, SoupEngine engine) {
  const PotentialBundle b(path(static_cast<std::size_t>(state.range(0))));
  const SoupSampler sampler(b, SoupOptions{1.0, TrivialMode::Aggregate, 0.0, engine});
  RandomStream rng(3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng).loops.size());
}
BENCHMARK_CAPTURE(BM_Soup, length_bridge, SoupEngine::LengthBridge)->Arg(3)->Arg(8);
BENCHMARK_CAPTURE(BM_Soup, rooted, SoupEngine::Rooted)->Arg(8)->Arg(64);

void BM_SoupSetup(benchmark::State& state) {
  const PotentialBundle b(path(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    SoupSampler sampler(b, SoupOptions{1.0});
    benchmark::DoNotOptimize(sampler.nontrivial_mass());
  }
}
BENCHMARK(BM_SoupSetup)->Arg(8)->Arg(64);

void BM_Wilson(benchmark::State& state) {
  const PotentialBundle b(path(static_cast<std::size_t>(state.range(0))));
  RandomStream rng(5, 6);
  for (auto _ : state) benchmark::DoNotOptimize(wilson_sample(b, rng).tree.parent.size());
}
BENCHMARK(BM_Wilson)->Arg(8)->Arg(64);

void BM_Permanent(benchmark::State& state) {
  const auto n = state.range(0);
  RandomStream rng(7, 8);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(alpha_permanent(a, 0.5));
}
BENCHMARK(BM_Permanent)->DenseRange(3, 8);

}  // namespace

// the packaged benchmark_main archive carries LTO bytecode from another compiler
BENCHMARK_MAIN();
