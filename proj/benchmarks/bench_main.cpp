#include <random>

#include <benchmark/benchmark.h>

#include "stream_al/stream_al.hpp"

using namespace stream_al;

namespace {

std::vector<Vector> normal_rows(std::mt19937_64& rng, std::size_t n, std::size_t p) {
  std::normal_distribution<double> nd;
  std::vector<Vector> rows(n, Vector(p));
  for (auto& r : rows)
    for (double& v : r) v = nd(rng);
  return rows;
}

void BM_CdoDecide(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const auto design = new_design(normal_rows(rng, p + 2, p), Vector(p + 2, 0.0));
  auto s = QueryStrategy::cdo(0.1);
  s.set_gamma(1.0);
  const auto points = normal_rows(rng, 64, p);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.decide(design, points[i++ & 63]));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CdoDecide)->Arg(10)->Arg(20)->Arg(50)->Arg(100)->Complexity(benchmark::oNSquared);

void BM_Augment(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  const auto base = new_design(normal_rows(rng, p + 2, p), Vector(p + 2, 0.0));
  const auto points = normal_rows(rng, 64, p);
  for (auto _ : state) {
    state.PauseTiming();
    auto d = base;
    state.ResumeTiming();
    d.augment(points[0], 0.0);
    benchmark::DoNotOptimize(d.gram_inv().data());
  }
}
BENCHMARK(BM_Augment)->Arg(10)->Arg(50)->Arg(100);

void BM_CdoRefresh(benchmark::State& state) {
  const auto w = static_cast<std::size_t>(state.range(0));
  const std::size_t p = 10;
  std::mt19937_64 rng(3);
  const auto design = new_design(normal_rows(rng, p + 2, p), Vector(p + 2, 0.0));
  auto s = QueryStrategy::cdo(0.1);
  s.refresh_threshold(design, normal_rows(rng, w, p));
  for (auto _ : state) {
    s.refresh_threshold(design);
    benchmark::DoNotOptimize(s.gamma());
  }
}
BENCHMARK(BM_CdoRefresh)->Arg(500)->Arg(2000);

void BM_FitWhitener(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  const auto rows = normal_rows(rng, 500, p);
  for (auto _ : state) benchmark::DoNotOptimize(fit_whitener(rows, false));
}
BENCHMARK(BM_FitWhitener)->Arg(10)->Arg(50)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
