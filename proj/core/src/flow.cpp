#include "cflow/flow.hpp"

#include <cmath>

#include "cflow/parallel.hpp"

namespace cflow {

const char* to_string(ExitReason r) {
  switch (r) {
    case ExitReason::Converged: return "Converged";
    case ExitReason::TimeUp: return "TimeUp";
    case ExitReason::Diverged: return "Diverged";
  }
  return "Unknown";
}

void FlowConfig::validate() const {
  if (policy == Policy::Explicit) {
    if (!(cfl > 0.0) || !(cfl <= 1.0))
      throw InvalidArgument("FlowConfig: cfl must be in (0, 1]");
  } else {
    if (!(dt > 0.0)) throw InvalidArgument("FlowConfig: imex dt must be positive");
  }
  if (!(t_max > 0.0)) throw InvalidArgument("FlowConfig: t_max must be positive");
  if (!(grad_tol > 0.0)) throw InvalidArgument("FlowConfig: grad_tol must be positive");
  if (monitor_every < 1) throw InvalidArgument("FlowConfig: monitor_every must be >= 1");
  if (snapshot_every < 0) throw InvalidArgument("FlowConfig: snapshot_every must be >= 0");
}

double explicit_dt(const Grid4& grid, double cfl, double lambda_g) {
  const double h = grid.min_spacing();
  return cfl * h * h * h * h / (16.0 * lambda_g);
}

namespace {

Field axpy(const Field& x, const Field& y, double a) {
  Field out = x;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] += a * y[i];
  return out;
}

/// Lap0^2 with the composed central stencils (matches the spectral symbol).
Field flat_bilaplacian(const Field& v) {
  Field lap(v.grid(), v.rank());
  for (int i = 0; i < 4; ++i) {
    Field d2 = diff(v, i, 2);
    for (std::int64_t k = 0; k < lap.size(); ++k) lap[k] += d2[k];
  }
  Field out(v.grid(), v.rank());
  for (int i = 0; i < 4; ++i) {
    Field d2 = diff(lap, i, 2);
    for (std::int64_t k = 0; k < out.size(); ++k) out[k] += d2[k];
  }
  return out;
}

double dissipation_rate(const MapField& u, const MetricWorkspace& ws, const Field& L) {
  return 2.0 * section_l2_pair(u, ws, L, L);
}

} // namespace

DiagnosticsRecord monitor(const FlowState& state, const MetricWorkspace& ws, const Field& L,
                          double energy0, const DiagnosticsRecord* prev) {
  DiagnosticsRecord r;
  r.t = state.t;
  EnergyReport rep = energy_report(state.u, ws);
  r.energy = rep.conformal;
  r.dirichlet = rep.dirichlet;
  r.hessian = rep.hessian;
  r.quartic = rep.quartic;
  r.grad_norm = max_norm(L);
  r.diss_rate = dissipation_rate(state.u, ws, L);
  if (prev) {
    r.dissipation_integral =
        prev->dissipation_integral + 0.5 * (r.t - prev->t) * (r.diss_rate + prev->diss_rate);
  }
  r.identity_residual =
      std::abs(r.energy + r.dissipation_integral - energy0) / (std::abs(energy0) + 1.0);
  if (!std::isfinite(r.energy) || !std::isfinite(r.grad_norm))
    throw FlowDiverged("monitor: non-finite diagnostics");
  return r;
}

FlowState step_explicit(const FlowState& state, const MetricWorkspace& ws,
                        const FlowConfig& cfg, const Field& L) {
  const double dt = explicit_dt(state.u.grid(), cfg.cfl, ws.lambda_g);
  FlowState next{state.u, state.t + dt, state.step + 1, {}};
  if (cfg.scheme == FlowConfig::Scheme::Euler) {
    next.u = state.u.with_disp(axpy(state.u.disp(), L, -dt));
  } else {
    // Classical RK4 on dt u = -L(u); k1 is the caller's L(u).
    MapField u2 = state.u.with_disp(axpy(state.u.disp(), L, -0.5 * dt));
    Field k2 = c_harmonic_operator(u2, ws);
    MapField u3 = state.u.with_disp(axpy(state.u.disp(), k2, -0.5 * dt));
    Field k3 = c_harmonic_operator(u3, ws);
    MapField u4 = state.u.with_disp(axpy(state.u.disp(), k3, -dt));
    Field k4 = c_harmonic_operator(u4, ws);
    Field d = state.u.disp();
    const double w = dt / 6.0;
    for (std::int64_t i = 0; i < d.size(); ++i)
      d[i] -= w * (L[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    next.u = state.u.with_disp(std::move(d));
  }
  return next;
}

FlowState step_imex(const FlowState& state, const MetricWorkspace& ws, double dt,
                    const BilaplacianSolver& solver, const Field& L) {
  if (!ws.flat)
    throw InvalidArgument("step_imex: unsupported for non-flat background metrics");
  Field bilap = flat_bilaplacian(state.u.disp());
  Field rhs = state.u.disp();
  for (std::int64_t i = 0; i < rhs.size(); ++i) rhs[i] -= dt * (L[i] - bilap[i]);
  Field d = solver.solve(rhs, dt);
  FlowState next{state.u.with_disp(std::move(d)), state.t + dt, state.step + 1, {}};
  return next;
}

FlowResult run_flow(const MapField& u0, const MetricField& g, const FlowConfig& cfg,
                    const std::function<void(const FlowState&)>& snapshot_cb) {
  return run_flow(u0, MetricWorkspace::make(g), cfg, snapshot_cb);
}

FlowResult run_flow(const MapField& u0, const MetricWorkspace& ws, const FlowConfig& cfg,
                    const std::function<void(const FlowState&)>& snapshot_cb) {
  cfg.validate();
  if (!(u0.grid() == ws.grid())) throw InvalidArgument("run_flow: grid mismatch");

  const LinearPart class_of_u0 = u0.linear_part();
  FlowState st{u0, 0.0, 0, {}};
  std::optional<BilaplacianSolver> solver;
  if (cfg.policy == FlowConfig::Policy::Imex) {
    if (!ws.flat)
      throw InvalidArgument("run_flow: imex policy requires a flat background metric");
    solver.emplace(u0.grid());
  }

  Field L = c_harmonic_operator(st.u, ws);
  const double e0 = energy_report(st.u, ws).conformal;
  st.history.push_back(monitor(st, ws, L, e0, nullptr));

  ExitReason reason = ExitReason::TimeUp;
  try {
    while (true) {
      if (max_norm(L) < cfg.grad_tol) {
        reason = ExitReason::Converged;
        break;
      }
      if (st.t >= cfg.t_max) {
        reason = ExitReason::TimeUp;
        break;
      }
      FlowState next = (cfg.policy == FlowConfig::Policy::Explicit)
                           ? step_explicit(st, ws, cfg, L)
                           : step_imex(st, ws, cfg.dt, *solver, L);
      next.history = std::move(st.history);
      st = std::move(next);
      L = c_harmonic_operator(st.u, ws);
      if (!L.all_finite()) throw FlowDiverged("run_flow: non-finite gradient");
      if (st.step % cfg.monitor_every == 0)
        st.history.push_back(monitor(st, ws, L, e0, &st.history.back()));
      if (snapshot_cb && cfg.snapshot_every > 0 && st.step % cfg.snapshot_every == 0)
        snapshot_cb(st);
    }
  } catch (const FlowDiverged&) {
    reason = ExitReason::Diverged;
  }

  if (st.history.empty() || st.history.back().t != st.t) {
    try {
      st.history.push_back(monitor(st, ws, L, e0, &st.history.back()));
    } catch (const FlowDiverged&) {
      reason = ExitReason::Diverged;
    }
  }
  // Homotopy preservation is structural; verify anyway.
  if (st.u.linear_part() != class_of_u0)
    throw std::logic_error("run_flow: homotopy class changed");
  return {std::move(st), reason};
}

} // namespace cflow
