#include "esurf/dynamics.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_EffectiveExperiment(benchmark::State& state) {
  const esurf::CircuitParams base;
  const esurf::BerryLoopSpec loop;
  esurf::ExperimentOptions opt;
  opt.mode = esurf::ExperimentMode::effective;
  opt.theta_points = 48;
  for (auto _ : state)
    benchmark::DoNotOptimize(esurf::berry_phase_experiment(base, loop, opt).braid.phase);
}
BENCHMARK(BM_EffectiveExperiment)->Unit(benchmark::kMillisecond);

void BM_LabFitPoint(benchmark::State& state) {
  const esurf::CircuitParams c = esurf::schedule_point({}, esurf::mhz(1.0), esurf::mhz(2.0), 0.0);
  const auto times = esurf::fit_sample_times({});
  for (auto _ : state)
    benchmark::DoNotOptimize(esurf::lab_fit_data(c, times, {}, {}));
}
BENCHMARK(BM_LabFitPoint)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace
