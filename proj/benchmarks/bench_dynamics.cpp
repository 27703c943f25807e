#include <benchmark/benchmark.h>

#include "ellvne/dynamics.hpp"
#include "ellvne/scenarios.hpp"

namespace {

void BM_integrate_scenario(benchmark::State& state) {
  const auto kind = ellvne::all_scenarios().at(static_cast<std::size_t>(state.range(0)));
  const auto inst = ellvne::make_scenario(ellvne::ScenarioSpec::with_defaults(kind));
  const auto [lo, hi] = inst.default_span();
  const auto grid = ellvne::uniform_grid(lo, hi, 101);
  const double t0 = lo <= 0.0 && 0.0 <= hi ? 0.0 : lo;
  const ellvne::HermitianOperator rho0(inst.path.state(t0), 1e-10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ellvne::integrate(rho0, t0, ellvne::MapRhs{inst.map}, grid));
  }
  state.SetLabel(ellvne::to_string(kind));
}
BENCHMARK(BM_integrate_scenario)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_theorem_residual(benchmark::State& state) {
  const auto mb = ellvne::maxwell_bloch(1.0, 1.0);
  const auto path = ellvne::analytic_path(mb.system);
  double t = -10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ellvne::vne_residual(path, mb.map, t));
    t = t > 10.0 ? -10.0 : t + 0.01;
  }
}
BENCHMARK(BM_theorem_residual);

}  // namespace
