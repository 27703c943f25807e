#include <benchmark/benchmark.h>

#include "ellvne/elliptic.hpp"

namespace {

void BM_sncndn(benchmark::State& state) {
  const ellvne::EllipticModulus k(static_cast<double>(state.range(0)) / 100.0);
  double u = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ellvne::jacobi_sncndn(u, k));
    u += 0.013;
    if (u > 20.0) u = -20.0;
  }
}
BENCHMARK(BM_sncndn)->Arg(0)->Arg(30)->Arg(70)->Arg(99)->Arg(100);

void BM_complete_K(benchmark::State& state) {
  const ellvne::EllipticModulus k(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(ellvne::complete_elliptic_K(k));
}
BENCHMARK(BM_complete_K);

}  // namespace
