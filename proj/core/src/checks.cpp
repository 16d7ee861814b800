#include "cflow/checks.hpp"

#include <cmath>
#include <random>

#include "cflow/field_io.hpp"
#include "cflow/flow.hpp"
#include "cflow/pullback.hpp"
#include "cflow/scenario.hpp"

namespace cflow {

namespace {

CheckResult make_result(std::string name, double measured, double threshold,
                        std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.measured = measured;
  r.threshold = threshold;
  r.pass = measured <= threshold;
  r.detail = std::move(detail);
  return r;
}

Field rolled(const Field& f, int axis, int steps) {
  const Grid4& g = f.grid();
  Field out(g, f.rank());
  const int n = g.dims[axis];
  const std::int64_t nodes = g.node_count();
  for (std::int64_t node = 0; node < nodes; ++node) {
    auto idx = g.unpack(node);
    idx[std::size_t(axis)] = (idx[std::size_t(axis)] + steps % n + n) % n;
    const std::int64_t dst = g.pack(idx);
    for (int c = 0; c < f.components(); ++c) out.at(dst, c) = f.at(node, c);
  }
  return out;
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace

std::vector<CheckResult> run_check_suite(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const Grid4 grid = build_grid(cfg);
  const MetricField metric = build_metric(cfg, grid);
  const MetricWorkspace ws = MetricWorkspace::make(metric);
  const MetricField flat = MetricField::flat(grid);
  const MetricWorkspace flat_ws = MetricWorkspace::make(flat);
  const SpaceForm target = cfg.target ? build_target(*cfg.target)
                                      : SpaceForm::flat_torus(2, {1.0, 1.0});
  const SpaceForm ball = SpaceForm::hyperbolic_ball(2, -1.0);
  const double h = grid.min_spacing();
  std::mt19937_64 rng(cfg.seed + 7);

  // --- grid ---
  {
    Field c(grid, {RankKind::Scalar, 1}, 3.25);
    out.push_back(make_result("grid.diff_constant_zero", max_norm(diff(c, 2, 1)), 0.0));
  }
  {
    Field f = random_section(grid, 1, cfg.seed + 11, 2, 1.0);
    double worst = 0.0;
    for (int a = 0; a < 4; ++a) worst = std::max(worst, std::abs(integrate(diff(f, a, 1))));
    out.push_back(make_result("grid.divergence_theorem", worst, 1e-10,
                              "|Int D_a f| over all axes, unit volume"));
  }
  {
    Field f = random_section(grid, 1, cfg.seed + 13, 2, 1.0);
    double worst = 0.0;
    for (int a = 0; a < 4; ++a)
      worst = std::max(worst, max_diff(diff(rolled(f, a, 1), a, 1), rolled(diff(f, a, 1), a, 1)));
    out.push_back(
        make_result("grid.translation_commute", worst, 0.0, "diff vs one-cell translation"));
  }
  {
    Field rhs = random_section(grid, 1, cfg.seed + 17, 3, 1.0);
    const double alpha = 0.37;
    Field w = spectral_solve_bilaplacian(rhs, alpha);
    Field lap(grid, {RankKind::Scalar, 1});
    for (int a = 0; a < 4; ++a) {
      Field d2 = diff(w, a, 2);
      for (std::int64_t i = 0; i < lap.size(); ++i) lap[i] += d2[i];
    }
    Field bilap(grid, {RankKind::Scalar, 1});
    for (int a = 0; a < 4; ++a) {
      Field d2 = diff(lap, a, 2);
      for (std::int64_t i = 0; i < bilap.size(); ++i) bilap[i] += d2[i];
    }
    double resid = 0.0;
    for (std::int64_t i = 0; i < rhs.size(); ++i)
      resid = std::max(resid, std::abs(w[i] + alpha * bilap[i] - rhs[i]));
    out.push_back(make_result("grid.spectral_residual", resid / max_norm(rhs), 1e-10,
                              "relative forward-operator residual"));
  }

  // --- geometry ---
  {
    double worst = 0.0;
    for (std::int64_t node = 0; node < grid.node_count(); ++node)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double s = 0.0;
          for (int k = 0; k < 4; ++k)
            s += metric.g().at(node, sym_index(i, k)) * metric.g_inv().at(node, sym_index(k, j));
          worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    out.push_back(make_result("geometry.metric_inverse_identity", worst, 1e-12));
  }
  {
    double worst = 0.0;
    for (std::int64_t node = 0; node < grid.node_count(); ++node) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          s += metric.g_inv().at(node, sym_index(i, j)) * ws.rc.ric.at(node, sym_index(i, j));
      worst = std::max(worst, std::abs(s - ws.rc.scal.at(node, 0)));
    }
    out.push_back(make_result("geometry.scal_contraction", worst, 1e-12,
                              "g^{ij} Ric_ij vs stored scalar curvature"));
  }
  {
    CurvatureBundle cb = curvature(flat);
    out.push_back(make_result("geometry.flat_curvature_zero",
                              std::max(max_norm(cb.riem), max_norm(cb.scal)), 1e-10));
  }
  {
    Field phi(grid, {RankKind::Scalar, 1}, 0.3);
    CurvatureBundle cb = curvature(conformal_metric(phi, flat));
    out.push_back(
        make_result("geometry.constant_conformal_flat", max_norm(cb.riem), 1e-10,
                    "Riemann of e^{2c} delta"));
  }
  {
    CurvatureBundle cb = curvature(metric);
    double scale = std::max(1.0, max_norm(cb.riem));
    double worst = 0.0;
    for (std::int64_t node = 0; node < grid.node_count(); ++node)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
              worst = std::max(worst,
                               std::abs(cb.riem.at(node, ((k * 4 + l) * 4 + i) * 4 + j) +
                                        cb.riem.at(node, ((k * 4 + l) * 4 + j) * 4 + i)));
    out.push_back(make_result("geometry.riemann_antisym_ij", worst / scale, 1e-14,
                              "R^k_lij + R^k_lji, relative"));
  }

  // --- target ---
  {
    std::uniform_real_distribution<double> comp(-0.4, 0.4);
    double worst_anti = 0.0, worst_skew = 0.0, worst_sign = 0.0, scale = 1e-30;
    for (int trial = 0; trial < 1000; ++trial) {
      std::array<double, 2> y{comp(rng) * 0.8, comp(rng) * 0.8};
      std::array<double, 2> X{comp(rng), comp(rng)}, Y{comp(rng), comp(rng)},
          Z{comp(rng), comp(rng)}, W{comp(rng), comp(rng)};
      auto hm = ball.metric_h(y);
      auto dot = [&](std::span<const double> a, std::span<const double> b) {
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) s += hm[std::size_t(i * 2 + j)] * a[i] * b[j];
        return s;
      };
      auto rxy = ball.curv_op(y, X, Y, Z);
      auto ryx = ball.curv_op(y, Y, X, Z);
      for (int i = 0; i < 2; ++i)
        worst_anti = std::max(worst_anti, std::abs(rxy[std::size_t(i)] + ryx[std::size_t(i)]));
      auto rzw = ball.curv_op(y, X, Y, W);
      worst_skew = std::max(worst_skew, std::abs(dot(rxy, W) + dot(rzw, Z)));
      auto rxzz = ball.curv_op(y, X, Z, Z);
      worst_sign = std::max(worst_sign, dot(rxzz, X));
      scale = std::max(scale, dot(rxy, rxy));
    }
    out.push_back(make_result("target.curv_op_antisymmetry", worst_anti / std::sqrt(scale), 1e-12));
    out.push_back(make_result("target.curv_op_pairing_skew", worst_skew / scale, 1e-10));
    out.push_back(make_result("target.curv_op_nonpositive", worst_sign, 1e-12,
                              "<R(X,Z)Z,X> over 1000 samples"));
  }
  {
    // Christoffels vs finite differences of metric_h in the chart.
    const double eps = 1e-5;
    std::array<double, 2> y{0.5, 0.0};
    auto gamma = ball.christoffel_N(y);
    double worst = 0.0;
    std::array<std::array<std::array<double, 2>, 2>, 2> dh{};
    for (int d = 0; d < 2; ++d) {
      auto yp = y, ym = y;
      yp[std::size_t(d)] += eps;
      ym[std::size_t(d)] -= eps;
      auto hp = ball.metric_h(yp), hm2 = ball.metric_h(ym);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          dh[std::size_t(d)][std::size_t(a)][std::size_t(b)] =
              (hp[std::size_t(a * 2 + b)] - hm2[std::size_t(a * 2 + b)]) / (2 * eps);
    }
    auto hm = ball.metric_h(y);
    const double det = hm[0] * hm[3] - hm[1] * hm[2];
    std::array<double, 4> hinv{hm[3] / det, -hm[1] / det, -hm[2] / det, hm[0] / det};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          double s = 0.0;
          for (int d = 0; d < 2; ++d)
            s += 0.5 * hinv[std::size_t(a * 2 + d)] *
                 (dh[std::size_t(b)][std::size_t(d)][std::size_t(c)] +
                  dh[std::size_t(c)][std::size_t(b)][std::size_t(d)] -
                  dh[std::size_t(d)][std::size_t(b)][std::size_t(c)]);
          worst = std::max(worst, std::abs(s - gamma[(std::size_t(a) * 2 + b) * 2 + c]));
        }
    out.push_back(make_result("target.christoffel_fd_oracle", worst, 1e-6));
  }

  // --- maps ---
  {
    LinearPart A{{1, 0, 0, 0}, {0, 1, 0, 0}};
    SpaceForm torus = SpaceForm::flat_torus(2, {1.0, 1.0});
    Field zero(grid, {RankKind::TargetVector, 2});
    MapField affine(grid, torus, A, zero);
    out.push_back(make_result("maps.tension_affine_zero",
                              max_norm(tension(affine, flat)), 1e-10));
    Field L = c_harmonic_operator(affine, flat_ws);
    out.push_back(make_result("energy.charmonic_affine_zero", max_norm(L), 1e-10));
    FlowState st{affine, 0.0, 0, {}};
    FlowConfig fc;
    fc.t_max = 1.0;
    FlowState next = step_explicit(st, flat_ws, fc, L);
    out.push_back(make_result("flow.critical_fixed_point",
                              max_diff(next.u.disp(), affine.disp()), 0.0));
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      MapField u = random_map(grid, target, cfg.seed + 100 + std::uint64_t(trial), 2, 0.1);
      Field gap = trace_free_gap(u, ws);
      double mn = 0.0;
      for (std::int64_t i = 0; i < gap.size(); ++i) mn = std::min(mn, gap[i]);
      worst = std::max(worst, -mn);
    }
    out.push_back(make_result("maps.trace_free_gap", worst, 1e-10,
                              "-(min |nabla du|^2 - |tau|^2/4) over 5 random maps"));
  }
  {
    MapField u = random_map(grid, ball, cfg.seed + 200, 2, 0.08);
    Field s = random_section(grid, 2, cfg.seed + 201, 2, 0.5);
    Field omega = random_section(grid, 2, cfg.seed + 202, 2, 0.5); // reshaped below
    Field om(grid, {RankKind::OneForm, 2});
    for (std::int64_t node = 0; node < grid.node_count(); ++node)
      for (int i = 0; i < 4; ++i)
        for (int a = 0; a < 2; ++a)
          om.at(node, i * 2 + a) = omega.at(node, a) * (1.0 + 0.2 * i);
    Field du = differential(u);
    Field cs = connection_on_section(u, s, du);
    Field ad = adjoint_div(u, om, ws.metric, du);
    const double lhs = oneform_l2_pair(u, ws, cs, om);
    const double rhs = section_l2_pair(u, ws, s, ad);
    const double scale = std::sqrt(oneform_l2_pair(u, ws, cs, cs)) *
                             std::sqrt(oneform_l2_pair(u, ws, om, om)) +
                         1e-30;
    out.push_back(make_result("maps.adjointness_defect", std::abs(lhs - rhs) / scale,
                              5.0 * h * h, "relative, O(h^2) by construction"));
  }
  {
    Field s = random_section(grid, 2, cfg.seed + 300, 2, 0.5);
    LinearPart A{{0, 0, 0, 0}, {0, 0, 0, 0}};
    SpaceForm torus = SpaceForm::flat_torus(2, {1.0, 1.0});
    MapField u = random_map(grid, torus, cfg.seed + 301, 2, 0.1, A);
    Field lap = rough_laplacian(u, s, metric);
    const MetricWorkspace& wsl = ws;
    const double quad = section_l2_pair(u, wsl, lap, s);
    const double snorm = section_l2_pair(u, wsl, s, s);
    out.push_back(make_result("maps.rough_laplacian_psd", -quad, 1e-10 * snorm,
                              "-<Lap s, s> vs 1e-10 ||s||^2"));
  }
  {
    LinearPart A{{1, 0, 0, 0}, {0, 0, 0, 0}};
    SpaceForm torus = SpaceForm::flat_torus(2, {1.0, 1.0});
    MapField u = random_map(grid, torus, cfg.seed + 400, 2, 0.2, A);
    Field shifted = u.disp();
    for (std::int64_t node = 0; node < grid.node_count(); ++node) {
      shifted.at(node, 0) += 3.0; // three periods
      shifted.at(node, 1) -= 1.0;
    }
    MapField u2 = u.with_disp(std::move(shifted));
    out.push_back(make_result("maps.rewrap_du_invariance",
                              max_diff(differential(u), differential(u2)), 1e-12));
  }

  // --- energy ---
  {
    MapField u = random_map(grid, target, cfg.seed + 500, 2, 0.1);
    EnergyReport r = energy_report(u, ws);
    out.push_back(make_result("energy.report_total_identity",
                              std::abs(r.total - (r.conformal + std::sqrt(r.quartic))), 0.0));
    const double c = comparison_constant(ws);
    const double gap = std::abs(r.conformal - r.biharmonic) - c * r.dirichlet;
    out.push_back(make_result("energy.functional_comparison", gap, 1e-12,
                              "|E - F| - c ||du||^2 with node-wise c"));
    EnergyReport rf = energy_report(u, flat_ws);
    out.push_back(make_result("energy.flat_E_equals_F",
                              std::abs(rf.conformal - rf.biharmonic),
                              1e-12 * (1.0 + std::abs(rf.biharmonic))));
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      MapField u = random_map(grid, target, cfg.seed + 600 + std::uint64_t(trial), 2, 0.1);
      Field v = random_section(grid, target.dim(), cfg.seed + 650 + std::uint64_t(trial), 2, 0.1);
      // keep <L(u), v> bounded away from zero (independent low-band draws can
      // be Fourier-orthogonal on flat backgrounds)
      for (std::int64_t i = 0; i < v.size(); ++i) v[i] += 0.3 * u.disp()[i];
      worst = std::max(worst, gradient_check(u, ws, v, 1e-4));
    }
    out.push_back(make_result("energy.gradient_check", worst, 1e-3,
                              "3 random draws at eps = 1e-4"));
  }

  // --- flow ---
  if (cfg.target && cfg.initial_map) {
    MapField u0 = build_initial_map(cfg, grid, target);
    FlowConfig fc = cfg.has_flow ? cfg.flow : FlowConfig{};
    fc.t_max = 1e30;
    fc.grad_tol = 1e-300;
    fc.monitor_every = 1;
    fc.snapshot_every = 0;
    const double dt = fc.policy == FlowConfig::Policy::Explicit
                          ? explicit_dt(grid, fc.cfl, ws.lambda_g)
                          : fc.dt;
    fc.t_max = 30.5 * dt;
    FlowResult res = run_flow(u0, ws, fc);
    double worst = 0.0;
    bool finite = true;
    for (std::size_t i = 1; i < res.state.history.size(); ++i) {
      const auto& a = res.state.history[i - 1];
      const auto& b = res.state.history[i];
      worst = std::max(worst, b.energy - a.energy - 10.0 * 2.2e-16 * std::abs(a.energy));
      finite = finite && std::isfinite(b.energy) && std::isfinite(b.grad_norm);
    }
    out.push_back(make_result("flow.short_run_monotonic", worst, 0.0,
                              "30 steps, per-record energy increase"));
    out.push_back(make_result("flow.short_run_finite", finite ? 0.0 : 1.0, 0.0));
  }

  // --- io ---
  {
    Field f = random_section(grid, 3, cfg.seed + 700, 2, 1.0);
    const std::string path = cfg.output_dir + "/check_roundtrip.cfl";
    write_field(path, f);
    Field g2 = read_field(path);
    double worst = (g2.size() == f.size()) ? 0.0 : 1.0;
    for (std::int64_t i = 0; worst == 0.0 && i < f.size(); ++i)
      if (f[i] != g2[i]) worst = 1.0;
    std::remove(path.c_str());
    out.push_back(make_result("io.container_roundtrip_bitexact", worst, 0.0));
  }

  return out;
}

} // namespace cflow
