#include "esurf/invariants.hpp"
#include "esurf/models.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_DDGrid(benchmark::State& state) {
  esurf::DDRequest req;
  req.radius = 1.0;
  req.kappa = 0.0;
  req.n_alpha = req.n_beta = req.n_phi = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(esurf::dd_invariant(req).dd);
}
BENCHMARK(BM_DDGrid)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_BerryLoop(benchmark::State& state) {
  esurf::BerryLoopSpec spec;
  spec.steps_per_loop = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(esurf::berry_phase(spec).phase);
}
BENCHMARK(BM_BerryLoop)->Arg(600)->Arg(3000)->Unit(benchmark::kMillisecond);

}  // namespace
