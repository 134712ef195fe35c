#include <benchmark/benchmark.h>
#include <omp.h>

#include <map>

#include "svarid/autocov.hpp"
#include "svarid/estimate.hpp"
#include "svarid/experiments.hpp"

using namespace svarid;

namespace {

const Eigen::MatrixXd& sample_data(std::int64_t T) {
  static std::map<std::int64_t, Eigen::MatrixXd> cache;
  auto it = cache.find(T);
  if (it == cache.end()) {
    const auto ex = worked_example(ExampleName::F2);
    std::mt19937_64 rng(1);
    it = cache.emplace(T, simulate(*draw_stable_params(ex.graph, rng), T, 1000, 2)).first;
  }
  return it->second;
}

void BM_AutocovSerial(benchmark::State& state) {
  const auto& d = sample_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_autocov_table_serial(d, 12, true));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AutocovParallel(benchmark::State& state) {
  const auto& d = sample_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_autocov_table(d, 12, true));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Bootstrap(benchmark::State& state) {
  const auto ex = worked_example(ExampleName::F2);
  const auto& d = sample_data(20000);
  const int before = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(block_bootstrap(d, ex.spec, 200, 64, 3, true));
  omp_set_num_threads(before);
}

}  // namespace

BENCHMARK(BM_AutocovSerial)->Arg(10000)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AutocovParallel)->Arg(10000)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap)->Arg(1)->Arg(omp_get_num_procs())->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
