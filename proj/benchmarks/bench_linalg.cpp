#include <benchmark/benchmark.h>

#include <random>

#include "ellvne/matrix.hpp"
#include "ellvne/operator_map.hpp"

namespace {

ellvne::ComplexMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ellvne::ComplexMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = g(rng);
    for (std::size_t j = i + 1; j < d; ++j) {
      m(i, j) = {g(rng), g(rng)};
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

void BM_hermitian_eigen(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_hermitian(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(ellvne::hermitian_eigen(a));
}
BENCHMARK(BM_hermitian_eigen)->Arg(2)->Arg(3)->Arg(8);

void BM_apply_map(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto m = ellvne::anticommutator_map(ellvne::HermitianOperator(random_hermitian(d, rng)));
  const auto a = random_hermitian(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(m.apply(a));
}
BENCHMARK(BM_apply_map)->Arg(2)->Arg(3)->Arg(8);

}  // namespace
