#include <benchmark/benchmark.h>

#include <cmath>

#include "cflow/energy.hpp"
#include "cflow/flow.hpp"
#include "cflow/scenario.hpp"

using namespace cflow;

namespace {

struct Setup {
  Grid4 grid;
  MetricWorkspace ws;
  MapField u;

  static Setup make(int n, bool flat, bool ball) {
    Grid4 g({n, n, n, n}, {1, 1, 1, 1});
    MetricField metric = MetricField::flat(g);
    if (!flat) {
      Field phi(g, {RankKind::Scalar, 1});
      for (std::int64_t node = 0; node < g.node_count(); ++node) {
        const auto idx = g.unpack(node);
        phi.at(node, 0) = 0.15 * std::sin(2 * M_PI * g.coord(0, idx[0])) *
                          std::sin(2 * M_PI * g.coord(1, idx[1]));
      }
      metric = conformal_metric(phi, metric);
    }
    SpaceForm target = ball ? SpaceForm::hyperbolic_ball(2, -1.0)
                            : SpaceForm::flat_torus(2, {1.0, 1.0});
    LinearPart A(2, {0, 0, 0, 0});
    if (!ball) A = {{1, 0, 0, 0}, {0, 1, 0, 0}};
    MapField u = random_map(g, target, 21, 2, 0.1, A);
    return Setup{g, MetricWorkspace::make(std::move(metric)), std::move(u)};
  }
};

} // namespace

static void BM_charmonic_flat_torus(benchmark::State& state) {
  Setup s = Setup::make(int(state.range(0)), true, false);
  for (auto _ : state) {
    Field L = c_harmonic_operator(s.u, s.ws);
    benchmark::DoNotOptimize(L.data());
  }
}
BENCHMARK(BM_charmonic_flat_torus)->Arg(16);

static void BM_charmonic_conformal_ball(benchmark::State& state) {
  Setup s = Setup::make(int(state.range(0)), false, true);
  for (auto _ : state) {
    Field L = c_harmonic_operator(s.u, s.ws);
    benchmark::DoNotOptimize(L.data());
  }
}
BENCHMARK(BM_charmonic_conformal_ball)->Arg(12)->Arg(16);

static void BM_energy_report(benchmark::State& state) {
  Setup s = Setup::make(int(state.range(0)), false, false);
  for (auto _ : state) {
    EnergyReport r = energy_report(s.u, s.ws);
    benchmark::DoNotOptimize(r.conformal);
  }
}
BENCHMARK(BM_energy_report)->Arg(16);

static void BM_flow_step_rk4(benchmark::State& state) {
  Setup s = Setup::make(int(state.range(0)), true, false);
  FlowConfig cfg;
  cfg.scheme = FlowConfig::Scheme::Rk4;
  FlowState st{s.u, 0.0, 0, {}};
  Field L = c_harmonic_operator(st.u, s.ws);
  for (auto _ : state) {
    FlowState next = step_explicit(st, s.ws, cfg, L);
    benchmark::DoNotOptimize(next.t);
  }
}
BENCHMARK(BM_flow_step_rk4)->Arg(16);

BENCHMARK_MAIN();
