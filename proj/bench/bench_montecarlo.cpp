// Serial against OpenMP path kernels on the two Monte Carlo workloads:
// an Euler-Maruyama diffusion side and a Gillespie jump side.

#include "duality/montecarlo.hpp"

#include <benchmark/benchmark.h>

using namespace duality;

namespace {

EstimatorConfig config(std::int64_t paths) {
  EstimatorConfig c;
  c.n_paths = static_cast<std::size_t>(paths);
  c.seed = 1;
  c.dt = 1e-3;
  c.t = 0.5;
  return c;
}

void diffusion_side(benchmark::State& state, Backend backend) {
  const ProcessSpec wf = ProcessSpec::wf_multitype(2, 0.5);
  const DualityFamily D = DualityFamily::product_gamma(0.5, 2);
  const EstimatorConfig cfg = config(state.range(0));
  for (auto _ : state) {
    const Estimate e = estimate_duality_side(wf, D, {{0.3, 0.7}, {}}, {{}, {2, 1}},
                                             ArgumentPosition::Left, cfg, backend);
    benchmark::DoNotOptimize(e.mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void jump_side(benchmark::State& state, Backend backend) {
  const ProcessSpec moran = ProcessSpec::moran_multitype(20, 2, 0.5);
  const DualityFamily D = DualityFamily::product_gamma(0.5, 2);
  const EstimatorConfig cfg = config(state.range(0));
  for (auto _ : state) {
    const Estimate e = estimate_duality_side(moran, D, {{}, {12, 8}}, {{0.3, 0.7}, {}},
                                             ArgumentPosition::Right, cfg, backend);
    benchmark::DoNotOptimize(e.mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(diffusion_side, serial, Backend::Serial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(diffusion_side, openmp, Backend::OpenMP)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(jump_side, serial, Backend::Serial)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(jump_side, openmp, Backend::OpenMP)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
