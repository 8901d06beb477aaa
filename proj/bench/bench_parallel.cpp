// Serial reference vs OpenMP kernels.
//
//   ./build/bench/aoi_bench --benchmark_filter=Experiment
//   OMP_NUM_THREADS=8 ./build/bench/aoi_bench

#include <benchmark/benchmark.h>

#include <random>

#include "aoi/geometry.hpp"
#include "aoi/scheme.hpp"

namespace {

aoi::HierarchyConfig bench_config() {
  return aoi::HierarchyConfig::optimal(4096.0, 1, aoi::LinkRates::uniform(1));
}

aoi::ExperimentOptions bench_options(aoi::Variant variant) {
  aoi::ExperimentOptions opts;
  opts.trials = 2000;
  opts.seed = 7;
  opts.variant = variant;
  return opts;
}

void BM_ExperimentSerial(benchmark::State& state) {
  const auto cfg = bench_config();
  const auto opts = bench_options(static_cast<aoi::Variant>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(aoi::run_experiment_serial(cfg, opts).age.mean_age);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(opts.trials));
}

void BM_ExperimentParallel(benchmark::State& state) {
  const auto cfg = bench_config();
  const auto opts = bench_options(static_cast<aoi::Variant>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(aoi::run_experiment(cfg, opts).age.mean_age);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(opts.trials));
}

aoi::geo::ActivationSet random_links(std::size_t count) {
  aoi::RngStream rng = aoi::make_stream(11, 0);
  std::uniform_real_distribution<double> u{0.0, 1.0};
  aoi::geo::ActivationSet set;
  set.gamma = 0.4;
  for (std::size_t i = 0; i < count; ++i) {
    const aoi::geo::Point tx{u(rng), u(rng)};
    set.links.push_back({tx, {tx.x + 1e-3 * u(rng), tx.y + 1e-3 * u(rng)}});
  }
  return set;
}

void BM_ProtocolSerial(benchmark::State& state) {
  const auto set = random_links(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(aoi::geo::check_protocol_model_serial(set).violations.size());
  }
}

void BM_ProtocolParallel(benchmark::State& state) {
  const auto set = random_links(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(aoi::geo::check_protocol_model(set).violations.size());
  }
}

}  // namespace

BENCHMARK(BM_ExperimentSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProtocolSerial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProtocolParallel)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
