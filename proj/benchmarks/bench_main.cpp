#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gwshm/detectors.hpp"
#include "gwshm/spectral.hpp"
#include "gwshm/statdist.hpp"

using namespace gwshm;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

}  // namespace

// Default experimental configuration, packet (500) and full record (8000).
static void BM_WelchPsd(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  const WelchConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(welch_psd(x, 24e6, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WelchPsd)->Arg(500)->Arg(8000);

static void BM_FQuantile(benchmark::State& state) {
  const double d1 = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stats::f_quantile(0.975, d1, 18.0));
}
BENCHMARK(BM_FQuantile)->Arg(18)->Arg(270)->Arg(6360);

static void BM_Chi2Quantile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(stats::chi2_quantile(0.025, 318.0));
}
BENCHMARK(BM_Chi2Quantile);

static void BM_ZStatistic(benchmark::State& state) {
  const WelchConfig cfg;
  std::vector<PsdEstimate> base;
  for (int i = 0; i < 15; ++i) base.push_back(welch_psd(noise(500, 10 + i), 24e6, cfg));
  const BaselineEnsemble ensemble(base);
  const PsdEstimate unknown = welch_psd(noise(500, 99), 24e6, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(z_statistic(ensemble, unknown, Alpha(0.05), {150e3, 350e3}));
  }
}
BENCHMARK(BM_ZStatistic);

static void BM_BaselineEnsemble(benchmark::State& state) {
  const WelchConfig cfg;
  std::vector<PsdEstimate> base;
  for (int i = 0; i < 15; ++i) base.push_back(welch_psd(noise(500, 10 + i), 24e6, cfg));
  for (auto _ : state) benchmark::DoNotOptimize(BaselineEnsemble(base));
}
BENCHMARK(BM_BaselineEnsemble);
BENCHMARK_MAIN();
