#include <benchmark/benchmark.h>

#include <cmath>

#include "cflow/curvature.hpp"
#include "cflow/scenario.hpp"

using namespace cflow;

namespace {

MetricField conformal_test_metric(int n) {
  Grid4 g({n, n, n, n}, {1, 1, 1, 1});
  Field phi(g, {RankKind::Scalar, 1});
  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    const auto idx = g.unpack(node);
    phi.at(node, 0) = 0.15 * std::sin(2 * M_PI * g.coord(0, idx[0])) *
                      std::sin(2 * M_PI * g.coord(1, idx[1]));
  }
  return conformal_metric(phi, MetricField::flat(g));
}

} // namespace

static void BM_christoffels(benchmark::State& state) {
  MetricField g = conformal_test_metric(int(state.range(0)));
  for (auto _ : state) {
    Field gamma = christoffels(g);
    benchmark::DoNotOptimize(gamma.data());
  }
}
BENCHMARK(BM_christoffels)->Arg(12)->Arg(16);

static void BM_ricci_curvature(benchmark::State& state) {
  MetricField g = conformal_test_metric(int(state.range(0)));
  for (auto _ : state) {
    RicciData rc = ricci_curvature(g);
    benchmark::DoNotOptimize(rc.scal.data());
  }
}
BENCHMARK(BM_ricci_curvature)->Arg(12)->Arg(16)->Arg(24);

static void BM_q_total(benchmark::State& state) {
  MetricField g = conformal_test_metric(int(state.range(0)));
  RicciData rc = ricci_curvature(g);
  for (auto _ : state) benchmark::DoNotOptimize(q_total(g, rc));
}
BENCHMARK(BM_q_total)->Arg(12)->Arg(16);
