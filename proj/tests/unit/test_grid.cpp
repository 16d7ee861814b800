#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cflow/grid.hpp"
#include "cflow/spectral.hpp"

using namespace cflow;

namespace {

Grid4 unit_grid(int n) { return Grid4({n, n, n, n}, {1.0, 1.0, 1.0, 1.0}); }

Field sample(const Grid4& g, const std::function<double(double, double, double, double)>& f) {
  Field out(g, {RankKind::Scalar, 1});
  for (std::int64_t node = 0; node < g.node_count(); ++node) {
    const auto idx = g.unpack(node);
    out.at(node, 0) =
        f(g.coord(0, idx[0]), g.coord(1, idx[1]), g.coord(2, idx[2]), g.coord(3, idx[3]));
  }
  return out;
}

} // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid4({6, 8, 8, 8}, {1, 1, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(Grid4({9, 8, 8, 8}, {1, 1, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(Grid4({8, 8, 8, 8}, {0.0, 1, 1, 1}), InvalidArgument);
  Grid4 g({8, 10, 12, 16}, {1.0, 2.0, 0.5, 1.0});
  CHECK(g.node_count() == 8 * 10 * 12 * 16);
  CHECK(g.spacing[1] == doctest::Approx(0.2));
  CHECK(g.pack(g.unpack(12345)) == 12345);
}

TEST_CASE("diff of constants and symmetry directions vanish") {
  Grid4 g = unit_grid(8);
  Field c(g, {RankKind::Scalar, 1}, 2.5);
  for (int a = 0; a < 4; ++a) {
    CHECK(max_norm(diff(c, a, 1)) == 0.0);
    CHECK(max_norm(diff(c, a, 2)) == 0.0);
  }
  // x1-independent field has zero d/dx1
  Field f = sample(g, [](double x0, double, double x2, double) {
    return std::sin(2 * M_PI * x0) * std::cos(2 * M_PI * x2);
  });
  CHECK(max_norm(diff(f, 1, 1)) == 0.0);
  CHECK(max_norm(diff(f, 3, 1)) == 0.0);
}

TEST_CASE("diff errors") {
  Grid4 g = unit_grid(8);
  Field f(g, {RankKind::Scalar, 1});
  CHECK_THROWS_AS(diff(f, 4, 1), InvalidArgument);
  CHECK_THROWS_AS(diff(f, 0, 3), InvalidArgument);
  f.at(3, 0) = std::nan("");
  CHECK_THROWS_AS(diff(f, 0, 1), InvalidArgument);
}

TEST_CASE("diff converges at second order on sine data") {
  // Oracle: d/dx0 sin(2 pi x0) = 2 pi cos(2 pi x0); fit the error ratio
  // between 16^4 and 32^4 grids.
  auto err_at = [](int n) {
    Grid4 g({n, n, n, n}, {1, 1, 1, 1});
    Field f(g, {RankKind::Scalar, 1});
    Field exact(g, {RankKind::Scalar, 1});
    for (std::int64_t node = 0; node < g.node_count(); ++node) {
      const double x0 = g.coord(0, g.unpack(node)[0]);
      f.at(node, 0) = std::sin(2 * M_PI * x0);
      exact.at(node, 0) = 2 * M_PI * std::cos(2 * M_PI * x0);
    }
    Field d = diff(f, 0, 1);
    double worst = 0.0;
    for (std::int64_t i = 0; i < d.size(); ++i)
      worst = std::max(worst, std::abs(d[i] - exact[i]));
    return worst;
  };
  const double e16 = err_at(16);
  const double e32 = err_at(32);
  const double ratio = e16 / e32;
  CHECK(ratio > 3.6);
  CHECK(ratio < 4.4);
}

TEST_CASE("second-order stencil equals composed first differences") {
  Grid4 g = unit_grid(8);
  std::mt19937_64 rng(5);
  Field f(g, {RankKind::Scalar, 1});
  for (std::int64_t i = 0; i < f.size(); ++i)
    f[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
  for (int a = 0; a < 4; ++a) {
    Field once = diff(diff(f, a, 1), a, 1);
    Field wide = diff(f, a, 2);
    double worst = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i)
      worst = std::max(worst, std::abs(once[i] - wide[i]));
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("integrate: exactness and periodic spectral accuracy") {
  Grid4 g = unit_grid(16);
  Field one(g, {RankKind::Scalar, 1}, 1.0);
  Field vol(g, {RankKind::Scalar, 1}, 1.0);
  CHECK(integrate(one, vol) == doctest::Approx(1.0).epsilon(1e-14));

  // constant conformal factor: quadrature equals the closed form exactly
  const double phi = 0.1;
  Field vol_c(g, {RankKind::Scalar, 1}, std::exp(4.0 * phi));
  CHECK(integrate(one, vol_c) == doctest::Approx(std::exp(4.0 * phi)).epsilon(1e-12));

  // sin^2(2 pi x0) integrates to exactly 1/2 on the periodic lattice
  Field s = sample(g, [](double x0, double, double, double) {
    const double v = std::sin(2 * M_PI * x0);
    return v * v;
  });
  CHECK(std::abs(integrate(s, vol) - 0.5) < 1e-12);

  Field bad(g, {RankKind::Scalar, 1}, -1.0);
  CHECK_THROWS_AS(integrate(one, bad), InvalidArgument);
}

TEST_CASE("discrete divergence theorem") {
  Grid4 g = unit_grid(12);
  std::mt19937_64 rng(17);
  Field f(g, {RankKind::Scalar, 1});
  for (std::int64_t i = 0; i < f.size(); ++i)
    f[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
  for (int a = 0; a < 4; ++a) CHECK(std::abs(integrate(diff(f, a, 1))) < 1e-10);
}

TEST_CASE("spectral bilaplacian solve") {
  Grid4 g = unit_grid(8);

  SUBCASE("constants are untouched") {
    Field rhs(g, {RankKind::Scalar, 1}, 4.2);
    Field w = spectral_solve_bilaplacian(rhs, 0.7);
    double worst = 0.0;
    for (std::int64_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(w[i] - 4.2));
    CHECK(worst < 1e-12);
  }

  SUBCASE("alpha = 0 is the identity") {
    std::mt19937_64 rng(3);
    Field rhs(g, {RankKind::Scalar, 1});
    for (std::int64_t i = 0; i < rhs.size(); ++i)
      rhs[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
    Field w = spectral_solve_bilaplacian(rhs, 0.0);
    double worst = 0.0;
    for (std::int64_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(w[i] - rhs[i]));
    CHECK(worst < 1e-12);
  }

  SUBCASE("single Fourier mode matches the discrete symbol") {
    const double alpha = 0.05;
    const std::array<int, 4> k{1, 0, 2, 0};
    Field rhs(g, {RankKind::Scalar, 1});
    for (std::int64_t node = 0; node < g.node_count(); ++node) {
      const auto idx = g.unpack(node);
      double arg = 0.0;
      for (int a = 0; a < 4; ++a) arg += 2 * M_PI * k[std::size_t(a)] * g.coord(a, idx[a]);
      rhs.at(node, 0) = std::cos(arg);
    }
    const double lam = BilaplacianSolver::laplacian_symbol(g, k);
    const double expected_scale = 1.0 / (1.0 + alpha * lam * lam);
    Field w = spectral_solve_bilaplacian(rhs, alpha);
    double worst = 0.0;
    for (std::int64_t i = 0; i < w.size(); ++i)
      worst = std::max(worst, std::abs(w[i] - expected_scale * rhs[i]));
    CHECK(worst < 1e-10);
  }

  SUBCASE("matches a dense direct solve on 8^4") {
    // Dense oracle: assemble (Id + alpha Lap0^2) column by column from the
    // stencil operator and LU-solve the full 4096^2 system.
    const double alpha = 0.2;
    const std::int64_t n = g.node_count();
    std::mt19937_64 rng(11);
    Field rhs(g, {RankKind::Scalar, 1});
    for (std::int64_t i = 0; i < n; ++i)
      rhs[i] = std::uniform_real_distribution<double>(-1, 1)(rng);

    auto apply_op = [&](const Field& v) {
      Field lap(g, {RankKind::Scalar, 1});
      for (int a = 0; a < 4; ++a) {
        Field d2 = diff(v, a, 2);
        for (std::int64_t i = 0; i < n; ++i) lap[i] += d2[i];
      }
      Field bilap(g, {RankKind::Scalar, 1});
      for (int a = 0; a < 4; ++a) {
        Field d2 = diff(lap, a, 2);
        for (std::int64_t i = 0; i < n; ++i) bilap[i] += d2[i];
      }
      Field out = v;
      for (std::int64_t i = 0; i < n; ++i) out[i] += alpha * bilap[i];
      return out;
    };

    std::vector<double> A(std::size_t(n) * std::size_t(n));
    Field basis(g, {RankKind::Scalar, 1});
    for (std::int64_t j = 0; j < n; ++j) {
      basis[j] = 1.0;
      Field col = apply_op(basis);
      basis[j] = 0.0;
      for (std::int64_t i = 0; i < n; ++i) A[std::size_t(i) * std::size_t(n) + std::size_t(j)] = col[i];
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) x[std::size_t(i)] = rhs[i];
    // partial-pivot LU, forward/back substitution in place
    std::vector<std::int64_t> piv(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
      std::int64_t p = k;
      for (std::int64_t i = k + 1; i < n; ++i)
        if (std::abs(A[std::size_t(i) * std::size_t(n) + std::size_t(k)]) >
            std::abs(A[std::size_t(p) * std::size_t(n) + std::size_t(k)]))
          p = i;
      piv[std::size_t(k)] = p;
      if (p != k) {
        for (std::int64_t c = 0; c < n; ++c)
          std::swap(A[std::size_t(k) * std::size_t(n) + std::size_t(c)],
                    A[std::size_t(p) * std::size_t(n) + std::size_t(c)]);
        std::swap(x[std::size_t(k)], x[std::size_t(p)]);
      }
      const double pivval = A[std::size_t(k) * std::size_t(n) + std::size_t(k)];
      for (std::int64_t i = k + 1; i < n; ++i) {
        const double m = A[std::size_t(i) * std::size_t(n) + std::size_t(k)] / pivval;
        if (m == 0.0) continue;
        A[std::size_t(i) * std::size_t(n) + std::size_t(k)] = m;
        double* rowi = &A[std::size_t(i) * std::size_t(n)];
        const double* rowk = &A[std::size_t(k) * std::size_t(n)];
        for (std::int64_t c = k + 1; c < n; ++c) rowi[c] -= m * rowk[c];
        x[std::size_t(i)] -= m * x[std::size_t(k)];
      }
    }
    for (std::int64_t i = n - 1; i >= 0; --i) {
      double s = x[std::size_t(i)];
      const double* rowi = &A[std::size_t(i) * std::size_t(n)];
      for (std::int64_t c = i + 1; c < n; ++c) s -= rowi[c] * x[std::size_t(c)];
      x[std::size_t(i)] = s / rowi[i];
    }

    Field w = spectral_solve_bilaplacian(rhs, alpha);
    double worst = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(w[i] - x[std::size_t(i)]));
    CHECK(worst < 1e-9);
  }
}
