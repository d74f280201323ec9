#include "esurf/eigensystem.hpp"
#include "esurf/models.hpp"
#include "esurf/spectra.hpp"

#include <benchmark/benchmark.h>

namespace {

esurf::ESPoint sample_point() { return {0.31, -0.12, 0.77, 0.05, 1.0}; }

void BM_ClosedForm(benchmark::State& state) {
  const auto p = sample_point();
  for (auto _ : state) benchmark::DoNotOptimize(esurf::eig_closed_form_3x3(p));
}
BENCHMARK(BM_ClosedForm);

void BM_Biorthogonal(benchmark::State& state) {
  const esurf::MatX h = esurf::build_h_es(sample_point());
  for (auto _ : state) benchmark::DoNotOptimize(esurf::eig_biorthogonal(h));
}
BENCHMARK(BM_Biorthogonal);

void BM_Scan(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const esurf::Axis q1{-1.0, 1.0, n}, q2{0.0, 0.0, 1}, q3{0.0, 1.2, n};
  for (auto _ : state) benchmark::DoNotOptimize(esurf::es_scan(q1, q2, q3, 0.0, 1.0));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Scan)->Arg(16)->Arg(64);

}  // namespace
