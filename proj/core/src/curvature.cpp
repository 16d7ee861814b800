#include "cflow/curvature.hpp"

#include <cmath>

#include "cflow/parallel.hpp"

namespace cflow {

namespace {

inline int gidx(int k, int i, int j) { return k * 10 + sym_index(i, j); }

/// Extracts the 10-component slice Gamma^k_(..) of a Christoffel field.
Field christoffel_slice(const Field& gamma, int k) {
  Field out(gamma.grid(), {RankKind::Sym2, 1});
  const std::int64_t n = gamma.grid().node_count();
  parallel_for(n, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node)
      for (int c = 0; c < 10; ++c) out.at(node, c) = gamma.at(node, k * 10 + c);
  });
  return out;
}

} // namespace

Field christoffels(const MetricField& g) {
  const Grid4& grid = g.grid();
  Field gamma(grid, {RankKind::Christoffel, 1});
  if (g.is_flat()) return gamma;

  std::array<Field, 4> dg;
  for (int a = 0; a < 4; ++a) dg[a] = diff(g.g(), a, 1);

  const std::int64_t n = grid.node_count();
  parallel_for(n, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node) {
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
          for (int j = i; j < 4; ++j) {
            double s = 0.0;
            for (int l = 0; l < 4; ++l) {
              const double t = dg[i].at(node, sym_index(j, l)) +
                               dg[j].at(node, sym_index(i, l)) -
                               dg[l].at(node, sym_index(i, j));
              s += g.g_inv().at(node, sym_index(k, l)) * t;
            }
            gamma.at(node, gidx(k, i, j)) = 0.5 * s;
          }
    }
  });
  return gamma;
}

RicciData ricci_curvature(const MetricField& g) {
  const Grid4& grid = g.grid();
  Field gamma = christoffels(g);
  Field ric(grid, {RankKind::Sym2, 1});
  Field scal(grid, {RankKind::Scalar, 1});
  if (g.is_flat()) return {std::move(gamma), std::move(ric), std::move(scal)};

  // Ric_jl (symmetrized) = sum_i d_i Gamma^i_jl - 1/2 (d_j t_l + d_l t_j)
  //                        + t_m Gamma^m_jl - Gamma^i_jm Gamma^m_il,
  // with t_l = Gamma^i_il. All but the second term are symmetric in (j,l).
  for (int i = 0; i < 4; ++i) {
    Field slice = christoffel_slice(gamma, i);
    Field d = diff(slice, i, 1);
    const std::int64_t n = grid.node_count();
    parallel_for(n, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t node = b; node < e; ++node)
        for (int c = 0; c < 10; ++c) ric.at(node, c) += d.at(node, c);
    });
  }

  Field tr(grid, {RankKind::Vector, 1});
  const std::int64_t n = grid.node_count();
  parallel_for(n, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node)
      for (int l = 0; l < 4; ++l) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += gamma.at(node, gidx(i, i, l));
        tr.at(node, l) = s;
      }
  });
  std::array<Field, 4> dtr;
  for (int a = 0; a < 4; ++a) dtr[a] = diff(tr, a, 1);

  parallel_for(n, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node) {
      for (int j = 0; j < 4; ++j)
        for (int l = j; l < 4; ++l) {
          double s = -0.5 * (dtr[j].at(node, l) + dtr[l].at(node, j));
          for (int m = 0; m < 4; ++m) {
            s += tr.at(node, m) * gamma.at(node, gidx(m, j, l));
            for (int i = 0; i < 4; ++i)
              s -= gamma.at(node, gidx(i, j, m)) * gamma.at(node, gidx(m, i, l));
          }
          ric.at(node, sym_index(j, l)) += s;
        }
      double sc = 0.0;
      for (int j = 0; j < 4; ++j)
        for (int l = 0; l < 4; ++l)
          sc += g.g_inv().at(node, sym_index(j, l)) * ric.at(node, sym_index(j, l));
      scal.at(node, 0) = sc;
    }
  });
  return {std::move(gamma), std::move(ric), std::move(scal)};
}

CurvatureBundle curvature(const MetricField& g) {
  const Grid4& grid = g.grid();
  Field gamma = christoffels(g);
  Field riem(grid, {RankKind::Riemann, 1});
  Field ric_raw(grid, {RankKind::Mat, 1});
  Field ric(grid, {RankKind::Sym2, 1});
  Field scal(grid, {RankKind::Scalar, 1});

  if (!g.is_flat()) {
    std::array<Field, 4> dgam;
    for (int a = 0; a < 4; ++a) dgam[a] = diff(gamma, a, 1);
    const std::int64_t n = grid.node_count();
    parallel_for(n, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t node = b; node < e; ++node) {
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l)
            for (int i = 0; i < 4; ++i)
              for (int j = 0; j < 4; ++j) {
                double r = dgam[i].at(node, gidx(k, j, l)) -
                           dgam[j].at(node, gidx(k, i, l));
                for (int m = 0; m < 4; ++m)
                  r += gamma.at(node, gidx(k, i, m)) * gamma.at(node, gidx(m, j, l)) -
                       gamma.at(node, gidx(k, j, m)) * gamma.at(node, gidx(m, i, l));
                riem.at(node, ((k * 4 + l) * 4 + i) * 4 + j) = r;
              }
        for (int l = 0; l < 4; ++l)
          for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i) s += riem.at(node, ((i * 4 + l) * 4 + i) * 4 + j);
            ric_raw.at(node, l * 4 + j) = s;
          }
        double sc = 0.0;
        for (int l = 0; l < 4; ++l)
          for (int j = l; j < 4; ++j) {
            const double sym = 0.5 * (ric_raw.at(node, l * 4 + j) + ric_raw.at(node, j * 4 + l));
            ric.at(node, sym_index(l, j)) = sym;
            sc += (l == j ? 1.0 : 2.0) * g.g_inv().at(node, sym_index(l, j)) * sym;
          }
        scal.at(node, 0) = sc;
      }
    });
  }
  return {std::move(gamma), std::move(riem), std::move(ric_raw), std::move(ric), std::move(scal)};
}

double q_total(const MetricField& g, const RicciData& rc) {
  const Grid4& grid = g.grid();
  Field dens(grid, {RankKind::Scalar, 1});
  const std::int64_t n = grid.node_count();
  parallel_for(n, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node) {
      // |Ric|^2 = g^{ik} g^{jl} Ric_ij Ric_kl
      double r2 = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l)
              r2 += g.g_inv().at(node, sym_index(i, k)) *
                    g.g_inv().at(node, sym_index(j, l)) *
                    rc.ric.at(node, sym_index(i, j)) * rc.ric.at(node, sym_index(k, l));
      const double s = rc.scal.at(node, 0);
      dens.at(node, 0) = s * s - 3.0 * r2;
    }
  });
  return integrate(dens, g.vol()) / 12.0;
}

double q_total(const MetricField& g) { return q_total(g, ricci_curvature(g)); }

double yamabe_quotient(const MetricField& g, const RicciData& rc) {
  Field one(g.grid(), {RankKind::Scalar, 1}, 1.0);
  const double volume = integrate(one, g.vol());
  return integrate(rc.scal, g.vol()) / std::sqrt(volume);
}

double yamabe_quotient(const MetricField& g) {
  return yamabe_quotient(g, ricci_curvature(g));
}

} // namespace cflow
