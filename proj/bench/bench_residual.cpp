// Serial reference vs OpenMP sweep for the residual kernels.

#include "warpcheck/catalog.hpp"

#include <benchmark/benchmark.h>

using namespace warpcheck;

namespace {

const CatalogEntry& entry() {
  static const CatalogEntry e = [] {
    CatalogParams p;
    p.n = 4;
    p.m = 3;
    return make_entry("affine_conformal", p);
  }();
  return e;
}

void einstein(benchmark::State& state, Execution exec, DerivativeMode mode) {
  const auto spec = entry().spec.with_mode(mode);
  const auto metric = assemble_warped_metric(spec);
  const auto grid = product_grid(spec, static_cast<int>(state.range(0)), 0.1, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(einstein_residual(metric, *entry().derived_lambda, grid, 1e-6, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = exec == Execution::serial ? 1 : worker_count();
}

void oneill(benchmark::State& state, Execution exec) {
  const auto& spec = entry().spec;
  const auto grid = product_grid(spec, static_cast<int>(state.range(0)), 0.1, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(oneill_residuals(spec, *entry().derived_lambda, 0.0, grid, 1e-6, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(einstein, serial_analytic, Execution::serial, DerivativeMode::analytic)
    ->RangeMultiplier(4)->Range(64, 1024)->UseRealTime();
BENCHMARK_CAPTURE(einstein, parallel_analytic, Execution::parallel, DerivativeMode::analytic)
    ->RangeMultiplier(4)->Range(64, 1024)->UseRealTime();
BENCHMARK_CAPTURE(einstein, serial_fd, Execution::serial, DerivativeMode::finite_difference)
    ->Arg(256)->UseRealTime();
BENCHMARK_CAPTURE(einstein, parallel_fd, Execution::parallel, DerivativeMode::finite_difference)
    ->Arg(256)->UseRealTime();
BENCHMARK_CAPTURE(oneill, serial, Execution::serial)->Arg(1024)->UseRealTime();
BENCHMARK_CAPTURE(oneill, parallel, Execution::parallel)->Arg(1024)->UseRealTime();

BENCHMARK_MAIN();
