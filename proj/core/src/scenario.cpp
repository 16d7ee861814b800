#include "cflow/scenario.hpp"

#include <cmath>
#include <random>

#include "cflow/expression.hpp"
#include "cflow/parallel.hpp"

namespace cflow {

Grid4 build_grid(const RunConfig& cfg) { return Grid4(cfg.grid.dims, cfg.grid.lengths); }

Field eval_expression(const Grid4& grid, const std::string& expr_text) {
  Expression expr = Expression::parse(expr_text);
  Field out(grid, {RankKind::Scalar, 1});
  const std::int64_t nodes = grid.node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node) {
      const auto idx = grid.unpack(node);
      std::array<double, 4> x{grid.coord(0, idx[0]), grid.coord(1, idx[1]),
                              grid.coord(2, idx[2]), grid.coord(3, idx[3])};
      out.at(node, 0) = expr.eval(x);
    }
  });
  if (!out.all_finite()) throw ConfigError("config: 'metric.phi' evaluates to non-finite values");
  return out;
}

MetricField build_metric(const RunConfig& cfg, const Grid4& grid) {
  MetricField base = [&] {
    bool unit = true;
    for (double d : cfg.metric.base_diag) unit = unit && d == 1.0;
    if (unit) return MetricField::flat(grid);
    Field g(grid, {RankKind::Sym2, 1});
    const std::int64_t nodes = grid.node_count();
    for (std::int64_t node = 0; node < nodes; ++node)
      for (int i = 0; i < 4; ++i)
        g.at(node, sym_index(i, i)) = cfg.metric.base_diag[std::size_t(i)];
    return MetricField::from_components(std::move(g));
  }();
  if (cfg.metric.kind == MetricConfig::Kind::Flat) return base;
  Field phi = eval_expression(grid, cfg.metric.phi);
  return conformal_metric(phi, base);
}

SpaceForm build_target(const TargetConfig& cfg) {
  if (cfg.kind == TargetConfig::Kind::Torus)
    return SpaceForm::flat_torus(cfg.dim, cfg.periods);
  return SpaceForm::hyperbolic_ball(cfg.dim, cfg.K);
}

MapField build_initial_map(const RunConfig& cfg, const Grid4& grid, const SpaceForm& target) {
  if (!cfg.initial_map) throw ConfigError("config: missing 'initial_map'");
  const InitialMapConfig& im = *cfg.initial_map;
  const int n = target.dim();
  Field disp(grid, {RankKind::TargetVector, n});
  LinearPart A(std::size_t(n), std::array<int, 4>{});

  switch (im.kind) {
    case InitialMapConfig::Kind::Constant:
      for (std::int64_t node = 0; node < grid.node_count(); ++node)
        for (int a = 0; a < n; ++a) disp.at(node, a) = im.value[std::size_t(a)];
      break;
    case InitialMapConfig::Kind::AffinePlusModes:
    case InitialMapConfig::Kind::Affine:
      A = im.linear_part;
      for (const ModeConfig& m : im.modes) {
        const double k = 2.0 * M_PI * m.wavevector / grid.lengths[std::size_t(m.axis)];
        for (std::int64_t node = 0; node < grid.node_count(); ++node) {
          const auto idx = grid.unpack(node);
          disp.at(node, m.component) +=
              m.amplitude * std::sin(k * grid.coord(m.axis, idx[std::size_t(m.axis)]));
        }
      }
      break;
  }
  return MapField(grid, target, std::move(A), std::move(disp));
}

Field random_section(const Grid4& grid, int dim, std::uint64_t seed, int kmax, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kdist(-kmax, kmax);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);

  // Two plane-wave modes plus two separable product modes per component;
  // products keep the draw away from the plane-wave special case where
  // stencil-error integrands cancel by lattice orthogonality.
  constexpr int modes_per_comp = 4;
  struct Mode {
    std::array<double, 4> k;
    std::array<double, 2> phase;
    double c = 0.0;
    bool product = false;
    int axis_a = 0, axis_b = 1;
  };
  std::vector<std::vector<Mode>> modes(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a)
    for (int m = 0; m < modes_per_comp; ++m) {
      Mode mo{};
      for (int i = 0; i < 4; ++i)
        mo.k[std::size_t(i)] = 2.0 * M_PI * kdist(rng) / grid.lengths[std::size_t(i)];
      mo.phase = {phase(rng), phase(rng)};
      mo.c = coef(rng) * amp / modes_per_comp;
      mo.product = (m % 2 == 1);
      mo.axis_a = int(rng() % 4);
      mo.axis_b = int(rng() % 4);
      modes[std::size_t(a)].push_back(mo);
    }

  Field out(grid, {RankKind::TargetVector, dim});
  const std::int64_t nodes = grid.node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node) {
      const auto idx = grid.unpack(node);
      const std::array<double, 4> x{grid.coord(0, idx[0]), grid.coord(1, idx[1]),
                                    grid.coord(2, idx[2]), grid.coord(3, idx[3])};
      for (int a = 0; a < dim; ++a) {
        double s = 0.0;
        for (const Mode& mo : modes[std::size_t(a)]) {
          if (mo.product) {
            const int ia = mo.axis_a, ib = mo.axis_b;
            s += mo.c *
                 std::sin(mo.k[std::size_t(ia)] * x[std::size_t(ia)] + mo.phase[0]) *
                 std::sin(mo.k[std::size_t(ib)] * x[std::size_t(ib)] + mo.phase[1]);
          } else {
            double arg = mo.phase[0];
            for (int i = 0; i < 4; ++i) arg += mo.k[std::size_t(i)] * x[std::size_t(i)];
            s += mo.c * std::sin(arg);
          }
        }
        out.at(node, a) = s;
      }
    }
  });
  return out;
}

MapField random_map(const Grid4& grid, const SpaceForm& target, std::uint64_t seed, int kmax,
                    double amp, LinearPart linear_part) {
  if (linear_part.empty()) linear_part.assign(std::size_t(target.dim()), std::array<int, 4>{});
  Field disp = random_section(grid, target.dim(), seed, kmax, amp);
  return MapField(grid, target, std::move(linear_part), std::move(disp));
}

} // namespace cflow
