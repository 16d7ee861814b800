#include <benchmark/benchmark.h>

#include "cflow/grid.hpp"
#include "cflow/scenario.hpp"
#include "cflow/spectral.hpp"

using namespace cflow;

static void BM_diff_axis(benchmark::State& state) {
  const int n = int(state.range(0));
  const int axis = int(state.range(1));
  Grid4 g({n, n, n, n}, {1, 1, 1, 1});
  Field f = random_section(g, 2, 42, 2, 1.0);
  for (auto _ : state) {
    Field d = diff(f, axis, 1);
    benchmark::DoNotOptimize(d.data());
  }
  state.SetBytesProcessed(std::int64_t(state.iterations()) * f.size() * 16);
}
BENCHMARK(BM_diff_axis)->Args({16, 0})->Args({16, 3})->Args({24, 0})->Args({24, 3});

static void BM_integrate(benchmark::State& state) {
  const int n = int(state.range(0));
  Grid4 g({n, n, n, n}, {1, 1, 1, 1});
  Field f = random_section(g, 1, 7, 2, 1.0);
  Field vol(g, {RankKind::Scalar, 1}, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f, vol));
}
BENCHMARK(BM_integrate)->Arg(16)->Arg(24);

static void BM_spectral_solve(benchmark::State& state) {
  const int n = int(state.range(0));
  Grid4 g({n, n, n, n}, {1, 1, 1, 1});
  BilaplacianSolver solver(g);
  Field rhs = random_section(g, 2, 9, 3, 1.0);
  for (auto _ : state) {
    Field w = solver.solve(rhs, 1e-4);
    benchmark::DoNotOptimize(w.data());
  }
}
BENCHMARK(BM_spectral_solve)->Arg(16)->Arg(24);
