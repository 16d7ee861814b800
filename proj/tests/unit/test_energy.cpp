#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cflow/energy.hpp"
#include "cflow/pullback.hpp"
#include "cflow/scenario.hpp"

using namespace cflow;

namespace {

Grid4 unit_grid(int n) { return Grid4({n, n, n, n}, {1.0, 1.0, 1.0, 1.0}); }

SpaceForm torus2() { return SpaceForm::flat_torus(2, {1.0, 1.0}); }

MetricField conformal_test_metric(const Grid4& g, double amp = 0.15) {
  Field phi(g, {RankKind::Scalar, 1});
  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    const auto idx = g.unpack(node);
    phi.at(node, 0) = amp * std::sin(2 * M_PI * g.coord(0, idx[0])) *
                      std::sin(2 * M_PI * g.coord(1, idx[1]));
  }
  return conformal_metric(phi, MetricField::flat(g));
}

MapField affine_plus_mode(const Grid4& g, double amp, int k = 1) {
  LinearPart A{{1, 0, 0, 0}, {0, 1, 0, 0}};
  Field disp(g, {RankKind::TargetVector, 2});
  for (std::int64_t node = 0; node < g.node_count(); ++node)
    disp.at(node, 1) = amp * std::sin(2 * M_PI * k * g.coord(0, g.unpack(node)[0]));
  return MapField(g, torus2(), A, std::move(disp));
}

/// Formal three-term assembly of the fourth-order operator from the public
/// pullback/target operators; used as the continuum-consistency oracle for
/// the gradient-form implementation.
Field formal_operator(const MapField& u, const MetricWorkspace& ws) {
  const int n = u.dim();
  Field du = differential(u);
  Field tau = tension(u, ws.metric);
  Field term1 = rough_laplacian(u, tau, ws.metric);

  Field term2(u.grid(), {RankKind::TargetVector, n});
  if (u.target().curvature() != 0.0) {
    for (std::int64_t node = 0; node < u.grid().node_count(); ++node) {
      std::vector<double> y(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
      std::vector<double> X(static_cast<std::size_t>(n)), T(static_cast<std::size_t>(n)),
          Z(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) T[std::size_t(a)] = tau.at(node, a);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const double gij = ws.metric.g_inv().at(node, sym_index(i, j));
          if (gij == 0.0) continue;
          for (int a = 0; a < n; ++a) {
            X[std::size_t(a)] = du.at(node, i * n + a);
            Z[std::size_t(a)] = du.at(node, j * n + a);
          }
          auto r = u.target().curv_op(y, X, T, Z);
          for (int a = 0; a < n; ++a) term2.at(node, a) += gij * r[std::size_t(a)];
        }
      }
    }
  }

  // B du with B^j_i = 2/3 S delta - 2 Ric^j_i applied to the M-index
  Field bdu(u.grid(), {RankKind::OneForm, n});
  for (std::int64_t node = 0; node < u.grid().node_count(); ++node) {
    const double S = ws.rc.scal.at(node, 0);
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < n; ++a) {
        double v = (2.0 / 3.0) * S * du.at(node, i * n + a);
        for (int j = 0; j < 4; ++j) {
          double ric_mixed = 0.0;
          for (int k = 0; k < 4; ++k)
            ric_mixed += ws.metric.g_inv().at(node, sym_index(j, k)) *
                         ws.rc.ric.at(node, sym_index(k, i));
          v -= 2.0 * ric_mixed * du.at(node, j * n + a);
        }
        bdu.at(node, i * n + a) = v;
      }
  }
  Field term3 = adjoint_div(u, bdu, ws.metric, du);

  Field out(u.grid(), {RankKind::TargetVector, n});
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = term1[i] + term2[i] + term3[i];
  return out;
}

} // namespace

TEST_CASE("energy report identities") {
  Grid4 g = unit_grid(12);
  MetricField conf = conformal_test_metric(g);
  MetricWorkspace ws = MetricWorkspace::make(conf);
  MapField u = random_map(g, torus2(), 3, 2, 0.2, LinearPart{{1, 0, 0, 0}, {0, 1, 0, 0}});
  EnergyReport r = energy_report(u, ws);
  CHECK(r.total == r.conformal + std::sqrt(r.quartic));
  CHECK(r.biharmonic >= 0.0);
  CHECK(r.quartic >= 0.0);
  CHECK(r.hessian >= 0.0);
  CHECK(std::abs(r.conformal - r.biharmonic) <= comparison_constant(ws) * r.dirichlet);

  // constant map: everything vanishes
  Field czero(g, {RankKind::TargetVector, 2}, 0.4);
  MapField cmap(g, torus2(), LinearPart(2, {0, 0, 0, 0}), std::move(czero));
  EnergyReport rc = energy_report(cmap, ws);
  CHECK(rc.conformal == 0.0);
  CHECK(rc.total == 0.0);
  CHECK(rc.dirichlet == 0.0);
}

TEST_CASE("flat metric: conformal energy equals biharmonic energy") {
  Grid4 g = unit_grid(12);
  MetricWorkspace flat = MetricWorkspace::make(MetricField::flat(g));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    MapField u = random_map(g, torus2(), seed, 2, 0.2, LinearPart{{1, 0, 0, 0}, {0, 1, 0, 0}});
    EnergyReport r = energy_report(u, flat);
    CHECK(std::abs(r.conformal - r.biharmonic) <= 1e-12 * (1.0 + r.biharmonic));
  }
}

TEST_CASE("biharmonic energy of a single mode matches the discrete symbol") {
  Grid4 g = unit_grid(16);
  MetricWorkspace flat = MetricWorkspace::make(MetricField::flat(g));
  const double eps = 0.05;
  MapField u = affine_plus_mode(g, eps);
  const double h = g.spacing[0];
  const double lam = std::pow(std::sin(2 * M_PI / g.dims[0]) / h, 2);
  EnergyReport r = energy_report(u, flat);
  // exact discrete value: Int (lam eps sin)^2 = lam^2 eps^2 / 2
  CHECK(r.biharmonic == doctest::Approx(lam * lam * eps * eps / 2).epsilon(1e-12));
  // continuum value (4 pi^2 eps)^2 / 2 up to the symbol defect ~ (2 pi h)^2 / 3
  const double cont = std::pow(4 * M_PI * M_PI * eps, 2) / 2;
  CHECK(std::abs(r.biharmonic - cont) / cont < 2.0 * std::pow(2 * M_PI * h, 2) / 3.0);
  // affine map alone is harmonic: F = 0 to round-off
  MapField aff = affine_plus_mode(g, 0.0);
  CHECK(energy_report(aff, flat).biharmonic < 1e-20);
}

TEST_CASE("conformal invariance of E and total energy") {
  auto rel_defect = [](int n) {
    Grid4 g = unit_grid(n);
    MetricWorkspace flat = MetricWorkspace::make(MetricField::flat(g));
    MetricWorkspace conf = MetricWorkspace::make(conformal_test_metric(g));
    MapField u = affine_plus_mode(g, 0.05);
    EnergyReport a = energy_report(u, flat);
    EnergyReport b = energy_report(u, conf);
    return std::pair<double, double>{std::abs(a.conformal - b.conformal) / std::abs(a.conformal),
                                     std::abs(a.total - b.total) / std::abs(a.total)};
  };
  auto [e12, t12] = rel_defect(12);
  CHECK(e12 < 5e-3);
  CHECK(t12 < 5e-3);
  auto [e24, t24] = rel_defect(24);
  const double order = std::log2(e12 / e24) / std::log2(2.0);
  CHECK(order > 1.5);

  // the quartic term is pointwise conformally invariant (algebraic weights)
  Grid4 g = unit_grid(12);
  MapField u = affine_plus_mode(g, 0.05);
  EnergyReport a = energy_report(u, MetricWorkspace::make(MetricField::flat(g)));
  EnergyReport b = energy_report(u, MetricWorkspace::make(conformal_test_metric(g)));
  CHECK(a.quartic == doctest::Approx(b.quartic).epsilon(1e-12));

  // negative control: F alone is not conformally invariant
  CHECK(std::abs(a.biharmonic - b.biharmonic) > 1e-3 * a.biharmonic);
}

TEST_CASE("c_harmonic_operator zeros and the flat bi-Laplacian") {
  Grid4 g = unit_grid(16);
  MetricWorkspace flat = MetricWorkspace::make(MetricField::flat(g));
  MapField aff = affine_plus_mode(g, 0.0);
  CHECK(max_norm(c_harmonic_operator(aff, flat)) < 1e-10);

  const double eps = 0.03;
  MapField u = affine_plus_mode(g, eps);
  Field L = c_harmonic_operator(u, flat);
  const double h = g.spacing[0];
  const double lam = std::pow(std::sin(2 * M_PI / g.dims[0]) / h, 2);
  double worst_disc = 0.0, worst_cont = 0.0;
  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    const double s = std::sin(2 * M_PI * g.coord(0, g.unpack(node)[0]));
    worst_disc = std::max(worst_disc, std::abs(L.at(node, 1) - lam * lam * eps * s));
    worst_cont =
        std::max(worst_cont, std::abs(L.at(node, 1) - std::pow(2 * M_PI, 4) * eps * s));
  }
  CHECK(worst_disc < 1e-10);
  CHECK(worst_cont / (std::pow(2 * M_PI, 4) * eps) < 2.0 * std::pow(2 * M_PI * h, 2) / 3.0);
}

TEST_CASE("gradient consistency: dE(v) = 2 <L(u), v> to round-off / O(eps^2)") {
  Grid4 g = unit_grid(12);
  MetricWorkspace conf = MetricWorkspace::make(conformal_test_metric(g));

  SUBCASE("torus target: quadratic energy, errors at the round-off floor") {
    // the central quotient of a quadratic functional is exact, so the check
    // measures only cancellation noise ~ 1e-16 E / (eps |dE(v)|)
    for (std::uint64_t seed : {10u, 11u}) {
      MapField u = random_map(g, torus2(), seed, 2, 0.15,
                              LinearPart{{1, 0, 0, 0}, {0, 1, 0, 0}});
      Field v = random_section(g, 2, seed + 50, 2, 0.12);
      CHECK(gradient_check(u, conf, v, 1e-4) < 1e-5);
    }
  }

  SUBCASE("hyperbolic target: eps^2 branch with slope 2") {
    SpaceForm ball = SpaceForm::hyperbolic_ball(2, -1.0);
    MapField u = random_map(g, ball, 21, 2, 0.15);
    Field v = random_section(g, 2, 22, 2, 0.15);
    const double e3 = gradient_check(u, conf, v, 1e-3);
    const double e4 = gradient_check(u, conf, v, 1e-4);
    CHECK(e3 < 1e-3);
    CHECK(e4 < 1e-3);
    const double slope = std::log10(e3 / e4);
    CHECK(slope > 1.5);
    CHECK(slope < 2.5);
  }

  SUBCASE("hyperbolic target at small amplitude") {
    SpaceForm ball = SpaceForm::hyperbolic_ball(2, -1.0);
    MapField u = random_map(g, ball, 31, 2, 0.02);
    Field v = random_section(g, 2, 32, 2, 0.02);
    CHECK(gradient_check(u, conf, v, 1e-4) < 1e-3);
  }

  SUBCASE("chart violation raises") {
    SpaceForm ball = SpaceForm::hyperbolic_ball(2, -1.0);
    Field disp(g, {RankKind::TargetVector, 2});
    for (std::int64_t node = 0; node < g.node_count(); ++node) disp.at(node, 0) = 0.99;
    MapField u(g, ball, LinearPart(2, {0, 0, 0, 0}), std::move(disp));
    Field v(g, {RankKind::TargetVector, 2}, 1.0);
    CHECK_THROWS_AS(gradient_check(u, conf, v, 0.05), FlowDiverged);
  }
}

TEST_CASE("gradient-form operator agrees with the formal three-term assembly") {
  // Flat metric and torus target: both assemblies are the identical stencil
  // composition; curved data: they are consistent discretizations of the same
  // continuum operator, so the gap shrinks at O(h^2).
  {
    Grid4 g = unit_grid(12);
    MetricWorkspace flat = MetricWorkspace::make(MetricField::flat(g));
    MapField u = affine_plus_mode(g, 0.05);
    Field a = c_harmonic_operator(u, flat);
    Field b = formal_operator(u, flat);
    double worst = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    CHECK(worst < 1e-10);
  }
  auto gap = [](int n) {
    Grid4 g = unit_grid(n);
    MetricWorkspace conf = MetricWorkspace::make(conformal_test_metric(g));
    SpaceForm ball = SpaceForm::hyperbolic_ball(2, -1.0);
    MapField u = random_map(g, ball, 77, 2, 0.15);
    Field a = c_harmonic_operator(u, conf);
    Field b = formal_operator(u, conf);
    double worst = 0.0, scale = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, std::abs(a[i] - b[i]));
      scale = std::max(scale, std::abs(a[i]));
    }
    return worst / scale;
  };
  const double g8 = gap(8);
  const double g16 = gap(16);
  CHECK(g8 / g16 > 2.0); // O(h^2) consistency of the two assemblies
}

TEST_CASE("bochner residual") {
  SUBCASE("constant map reports zero") {
    Grid4 g = unit_grid(8);
    MetricWorkspace ws = MetricWorkspace::make(conformal_test_metric(g));
    Field czero(g, {RankKind::TargetVector, 2}, 0.2);
    MapField cmap(g, torus2(), LinearPart(2, {0, 0, 0, 0}), std::move(czero));
    CHECK(bochner_residual(cmap, ws) == 0.0);
  }
  SUBCASE("flat/flat: pure integration-by-parts defect, O(h^2)") {
    auto resid = [](int n) {
      Grid4 g = unit_grid(n);
      MetricWorkspace flat = MetricWorkspace::make(MetricField::flat(g));
      MapField u = random_map(g, torus2(), 5, 2, 0.2, LinearPart{{1, 0, 0, 0}, {0, 1, 0, 0}});
      return bochner_residual(u, flat);
    };
    CHECK(resid(12) < 2e-3);
  }
  SUBCASE("conformal metric, hyperbolic target: order-2 decay") {
    auto resid = [](int n) {
      Grid4 g = unit_grid(n);
      MetricWorkspace conf = MetricWorkspace::make(conformal_test_metric(g));
      SpaceForm ball = SpaceForm::hyperbolic_ball(2, -1.0);
      MapField u = random_map(g, ball, 42, 2, 0.1);
      return bochner_residual(u, conf);
    };
    const double r8 = resid(8);
    const double r16 = resid(16);
    CHECK(r16 < 5e-3);
    CHECK(r8 / r16 > 2.0);
  }
}

TEST_CASE("coercivity ratio") {
  Grid4 g = unit_grid(12);
  MetricWorkspace flat = MetricWorkspace::make(MetricField::flat(g));

  // harmonic nonconstant map on the flat class: E = 0, ratio 0 (mu(T4) = 0)
  MapField aff = affine_plus_mode(g, 0.0);
  CHECK(std::abs(coercivity_ratio(aff, flat)) < 1e-12);

  // non-harmonic map: E = F > 0
  MapField u = affine_plus_mode(g, 0.05);
  CHECK(coercivity_ratio(u, flat) > 0.0);

  // constant map: ||du|| = 0 is an error
  Field czero(g, {RankKind::TargetVector, 2}, 0.1);
  MapField cmap(g, torus2(), LinearPart(2, {0, 0, 0, 0}), std::move(czero));
  CHECK_THROWS_AS(coercivity_ratio(cmap, flat), InvalidArgument);

  // conformal family: numerator is invariant, denominator is not
  MetricWorkspace conf = MetricWorkspace::make(conformal_test_metric(g));
  const double r_flat = coercivity_ratio(u, flat);
  const double r_conf = coercivity_ratio(u, conf);
  EnergyReport a = energy_report(u, flat);
  EnergyReport b = energy_report(u, conf);
  CHECK(std::abs(a.conformal - b.conformal) < 5e-3 * std::abs(a.conformal));
  CHECK(std::isfinite(r_flat));
  CHECK(std::isfinite(r_conf));
}

TEST_CASE("local energy and the cutoff") {
  Grid4 g = unit_grid(16);
  MetricWorkspace flat = MetricWorkspace::make(MetricField::flat(g));

  SUBCASE("R too large is rejected") {
    MapField u = affine_plus_mode(g, 0.05);
    CHECK_THROWS_AS(local_energy(u, flat, 0, 0.3), InvalidArgument);
  }

  SUBCASE("constant map: zero local energy") {
    Field czero(g, {RankKind::TargetVector, 2}, 0.1);
    MapField cmap(g, torus2(), LinearPart(2, {0, 0, 0, 0}), std::move(czero));
    CHECK(local_energy(cmap, flat, 0, 0.2) == 0.0);
  }

  SUBCASE("cutoff derivative bounds: |grad eta| <= 16/R^2, |grad^2 eta| <= 16/R^4") {
    const double R = 0.2;
    Field eta = cutoff_field(g, g.pack({8, 8, 8, 8}), R);
    double worst1 = 0.0, worst2 = 0.0;
    for (int a = 0; a < 4; ++a) {
      worst1 = std::max(worst1, max_norm(diff(eta, a, 1)));
      for (int b = 0; b < 4; ++b)
        worst2 = std::max(worst2, max_norm(diff(diff(eta, a, 1), b, 1)));
    }
    CHECK(worst1 <= 16.0 / (R * R));
    CHECK(worst2 <= 16.0 / (R * R * R * R));
    // eta is exactly 1 on B_R and 0 outside B_2R
    CHECK(eta.at(g.pack({8, 8, 8, 8}), 0) == 1.0);
    CHECK(eta.at(g.pack({0, 8, 8, 8}), 0) == 0.0);
  }

  SUBCASE("concentrated map: the local ball captures nearly all energy") {
    // displacement bump supported well inside B_R(center)
    Field disp(g, {RankKind::TargetVector, 2});
    const std::int64_t center = g.pack({8, 8, 8, 8});
    for (std::int64_t node = 0; node < g.node_count(); ++node) {
      const auto idx = g.unpack(node);
      double d2 = 0.0;
      for (int a = 0; a < 4; ++a) {
        double dx = std::abs(g.coord(a, idx[std::size_t(a)]) - 0.5);
        dx = std::min(dx, 1.0 - dx);
        d2 += dx * dx;
      }
      const double r0 = 0.1;
      disp.at(node, 0) = d2 < r0 * r0 ? 0.05 * std::pow(1.0 - d2 / (r0 * r0), 3) : 0.0;
    }
    MapField u(g, torus2(), LinearPart(2, {0, 0, 0, 0}), std::move(disp));
    const double total = total_energy(u, flat.metric);
    const double local = local_energy(u, flat, center, 0.24);
    CHECK(local >= 0.99 * total);
    CHECK(local <= total * (1.0 + 1e-9));
  }

  SUBCASE("cover sum bounds the total from below by the cover deficiency") {
    MapField u = affine_plus_mode(g, 0.05);
    const double R = 0.24;
    // centers on a 3^4 sub-lattice every 5 or 6 cells: distance to the
    // nearest center stays well inside the eta support
    std::vector<std::int64_t> centers;
    for (int i0 : {2, 8, 13})
      for (int i1 : {2, 8, 13})
        for (int i2 : {2, 8, 13})
          for (int i3 : {2, 8, 13}) centers.push_back(g.pack({i0, i1, i2, i3}));
    Field cover(g, {RankKind::Scalar, 1});
    for (auto c : centers) {
      Field eta = cutoff_field(g, c, R);
      for (std::int64_t i = 0; i < cover.size(); ++i) cover[i] += eta[i];
    }
    double min_cover = 1e300;
    for (std::int64_t i = 0; i < cover.size(); ++i) min_cover = std::min(min_cover, cover[i]);
    REQUIRE(min_cover > 0.0);
    double local_sum = 0.0;
    for (auto c : centers) local_sum += local_energy(u, flat, c, R);
    const double total = total_energy(u, flat.metric);
    CHECK(local_sum >= std::min(1.0, min_cover) * total * (1.0 - 1e-9));
  }
}
