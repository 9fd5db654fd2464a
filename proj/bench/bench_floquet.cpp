// Floquet sweep timings: OpenMP pool against the serial reference.

#include <benchmark/benchmark.h>

#include <vector>

#include "kdvb/spectra.hpp"
#include "kdvb/waves.hpp"

namespace {

const kdvb::WaveProfile& profile() {
  static const std::vector<double> eps{0.01, 0.02};
  static const auto w = kdvb::continue_branch(1.0, 1.0, eps, 256).profiles.back();
  return w;
}

void BM_floquet_serial(benchmark::State& state) {
  const auto m = kdvb::kdvbf_model(1.0, 1.0);
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kdvb::floquet_sweep_serial(profile(), m, 17, N).max_real);
  }
}

void BM_floquet_parallel(benchmark::State& state) {
  const auto m = kdvb::kdvbf_model(1.0, 1.0);
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kdvb::floquet_sweep(profile(), m, 17, N).max_real);
  }
}

}  // namespace

BENCHMARK(BM_floquet_serial)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_floquet_parallel)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
