#include "cflow/energy.hpp"

#include <cmath>
#include <vector>

#include "cflow/parallel.hpp"
#include "cflow/pullback.hpp"

namespace cflow {

namespace {
inline int gidx(int k, int i, int j) { return k * 10 + sym_index(i, j); }
constexpr double kTiny = 1e-30;
} // namespace

MetricWorkspace MetricWorkspace::make(MetricField g) {
  RicciData rc = ricci_curvature(g);
  const Grid4& grid = g.grid();
  Field cvec(grid, {RankKind::Vector, 1});
  Field bup(grid, {RankKind::Sym2, 1});
  const std::int64_t nodes = grid.node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node) {
      for (int k = 0; k < 4; ++k) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            s += g.g_inv().at(node, sym_index(i, j)) * rc.gamma.at(node, gidx(k, i, j));
        cvec.at(node, k) = s;
      }
      const double S = rc.scal.at(node, 0);
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          double ric_up = 0.0;
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l)
              ric_up += g.g_inv().at(node, sym_index(i, k)) *
                        g.g_inv().at(node, sym_index(j, l)) * rc.ric.at(node, sym_index(k, l));
          bup.at(node, sym_index(i, j)) =
              (2.0 / 3.0) * S * g.g_inv().at(node, sym_index(i, j)) - 2.0 * ric_up;
        }
    }
  });
  const bool flat = g.is_flat();
  const double lam = flat ? 1.0 : g.inverse_eig_sq_max();
  return MetricWorkspace{std::move(g), std::move(rc), std::move(cvec), std::move(bup), lam, flat};
}

namespace {

/// Shared per-node data for one map against one workspace.
struct MapData {
  Field du;   // OneForm
  Field hess; // TwoTensor
  Field tau;  // TargetVector
};

MapData build_map_data(const MapField& u, const MetricWorkspace& ws) {
  Field du = differential(u);
  Field hess = pullback_derivative(u, du, ws.rc.gamma, du);
  Field tau = tension_from(ws.metric.g_inv(), hess);
  return {std::move(du), std::move(hess), std::move(tau)};
}

/// Scalar densities entering the report and residuals (all include the
/// h-metric factor but not the volume weight).
struct Densities {
  Field tau2, du2, bdu, hess2;
};

Densities densities(const MapField& u, const MetricWorkspace& ws, const MapData& md) {
  const Grid4& grid = u.grid();
  const int n = u.dim();
  Densities d{Field(grid, {RankKind::Scalar, 1}), Field(grid, {RankKind::Scalar, 1}),
              Field(grid, {RankKind::Scalar, 1}), Field(grid, {RankKind::Scalar, 1})};
  const bool ball = u.target().chart() == SpaceForm::Chart::HyperbolicBall;
  const std::int64_t nodes = grid.node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::int64_t node = b; node < e; ++node) {
      double hscale = 1.0;
      if (ball) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        hscale = u.target().h_scale(y);
      }
      double t2 = 0.0;
      for (int a = 0; a < n; ++a) t2 += md.tau.at(node, a) * md.tau.at(node, a);
      d.tau2.at(node, 0) = hscale * t2;

      double du2 = 0.0, bdu = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double dot = 0.0;
          for (int a = 0; a < n; ++a)
            dot += md.du.at(node, i * n + a) * md.du.at(node, j * n + a);
          du2 += ws.metric.g_inv().at(node, sym_index(i, j)) * dot;
          bdu += ws.bup.at(node, sym_index(i, j)) * dot;
        }
      d.du2.at(node, 0) = hscale * du2;
      d.bdu.at(node, 0) = hscale * bdu;

      double h2 = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
              const double gik = ws.metric.g_inv().at(node, sym_index(i, k));
              const double gjl = ws.metric.g_inv().at(node, sym_index(j, l));
              double dot = 0.0;
              for (int a = 0; a < n; ++a)
                dot += md.hess.at(node, (i * 4 + j) * n + a) *
                       md.hess.at(node, (k * 4 + l) * n + a);
              h2 += gik * gjl * dot;
            }
      d.hess2.at(node, 0) = hscale * h2;
    }
  });
  return d;
}

Field square(const Field& f) {
  Field out(f.grid(), f.rank());
  for (std::int64_t i = 0; i < f.size(); ++i) out[i] = f[i] * f[i];
  return out;
}

} // namespace

EnergyReport energy_report(const MapField& u, const MetricWorkspace& ws) {
  if (!(u.grid() == ws.grid())) throw InvalidArgument("energy_report: grid mismatch");
  MapData md = build_map_data(u, ws);
  Densities d = densities(u, ws, md);
  EnergyReport r;
  r.biharmonic = integrate(d.tau2, ws.metric.vol());
  const double bterm = integrate(d.bdu, ws.metric.vol());
  r.conformal = r.biharmonic + bterm;
  r.dirichlet = integrate(d.du2, ws.metric.vol());
  r.quartic = integrate(square(d.du2), ws.metric.vol());
  r.hessian = integrate(d.hess2, ws.metric.vol());
  r.total = r.conformal + std::sqrt(r.quartic);
  return r;
}

EnergyReport energy_report(const MapField& u, const MetricField& g) {
  return energy_report(u, MetricWorkspace::make(g));
}

double conformal_energy(const MapField& u, const MetricField& g) {
  return energy_report(u, g).conformal;
}
double biharmonic_energy(const MapField& u, const MetricField& g) {
  return energy_report(u, g).biharmonic;
}
double total_energy(const MapField& u, const MetricField& g) {
  return energy_report(u, g).total;
}

Field cutoff_field(const Grid4& grid, std::int64_t center, double R) {
  const double min_len = *std::min_element(grid.lengths.begin(), grid.lengths.end());
  if (!(R > 0.0) || !(2.0 * R < 0.5 * min_len))
    throw InvalidArgument("cutoff_field: R too large for grid (need 2R < half period)");
  Field eta(grid, {RankKind::Scalar, 1});
  const auto c = grid.unpack(center);
  const std::int64_t nodes = grid.node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node) {
      const auto idx = grid.unpack(node);
      double d2 = 0.0;
      for (int a = 0; a < 4; ++a) {
        double dx = std::abs(grid.coord(a, idx[a]) - grid.coord(a, c[a]));
        dx = std::min(dx, grid.lengths[a] - dx);
        d2 += dx * dx;
      }
      const double dist = std::sqrt(d2);
      double s = (dist - R) / R;
      s = std::clamp(s, 0.0, 1.0);
      const double q = 1.0 - s * s;
      eta.at(node, 0) = q * q;
    }
  });
  return eta;
}

double local_energy(const MapField& u, const MetricWorkspace& ws, std::int64_t center,
                    double R) {
  MapData md = build_map_data(u, ws);
  Densities d = densities(u, ws, md);
  Field eta = cutoff_field(u.grid(), center, R);
  Field conf(u.grid(), {RankKind::Scalar, 1});
  Field quart(u.grid(), {RankKind::Scalar, 1});
  for (std::int64_t i = 0; i < conf.size(); ++i) {
    conf[i] = eta[i] * (d.tau2[i] + d.bdu[i]);
    quart[i] = eta[i] * d.du2[i] * d.du2[i];
  }
  return integrate(conf, ws.metric.vol()) + std::sqrt(integrate(quart, ws.metric.vol()));
}

double local_energy(const MapField& u, const MetricField& g, std::int64_t center, double R) {
  return local_energy(u, MetricWorkspace::make(g), center, R);
}

namespace {

/// Accumulates grad += scale * D_i D_j f (composed first differences).
void acc_diff2(Field& grad, const Field& f, int i, int j, double scale) {
  Field tmp = diff(f, i, 1);
  add_diff(grad, tmp, j, scale);
}

/// Exact lattice gradient of the discrete energy. With include_b the full
/// conformal energy, without it the biharmonic energy F alone.
Field energy_gradient(const MapField& u, const MetricWorkspace& ws, bool include_b) {
  if (!(u.grid() == ws.grid()))
    throw InvalidArgument("c_harmonic_operator: grid mismatch");
  const Grid4& grid = u.grid();
  const int n = u.dim();
  const bool ball = u.target().chart() == SpaceForm::Chart::HyperbolicBall;
  const std::int64_t nodes = grid.node_count();

  // Flat metric, flat target: L = Lap0^2 v with composed central stencils.
  if (ws.flat && !ball) {
    Field lap(grid, {RankKind::TargetVector, n});
    for (int i = 0; i < 4; ++i) {
      Field d2 = diff(u.disp(), i, 2);
      for (std::int64_t k = 0; k < lap.size(); ++k) lap[k] += d2[k];
    }
    Field out(grid, {RankKind::TargetVector, n});
    for (int i = 0; i < 4; ++i) {
      Field d2 = diff(lap, i, 2);
      for (std::int64_t k = 0; k < out.size(); ++k) out[k] += d2[k];
    }
    return out;
  }

  MapData md = build_map_data(u, ws);

  // P_a = sqrt(g) h_ab tau^b; on space forms h = hscale * Id.
  Field P(grid, {RankKind::TargetVector, n});
  Field hscale(grid, {RankKind::Scalar, 1}, 1.0);
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::int64_t node = b; node < e; ++node) {
      double hs = 1.0;
      if (ball) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        hs = u.target().h_scale(y);
        hscale.at(node, 0) = hs;
      }
      const double sg = ws.metric.vol().at(node, 0);
      for (int a = 0; a < n; ++a) P.at(node, a) = sg * hs * md.tau.at(node, a);
    }
  });

  Field grad(grid, {RankKind::TargetVector, n});

  // (1) grad -= 2 sum_ij D_i D_j (g^{ij} P)
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      Field w(grid, {RankKind::TargetVector, n});
      parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t node = b; node < e; ++node) {
          const double gij = ws.metric.g_inv().at(node, sym_index(i, j));
          for (int a = 0; a < n; ++a) w.at(node, a) = gij * P.at(node, a);
        }
      });
      acc_diff2(grad, w, i, j, (i == j) ? -2.0 : -4.0);
    }

  // (2) grad -= 2 D_k (c^k P)
  if (!ws.flat) {
    for (int k = 0; k < 4; ++k) {
      Field w(grid, {RankKind::TargetVector, n});
      parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t node = b; node < e; ++node) {
          const double ck = ws.cvec.at(node, k);
          for (int a = 0; a < n; ++a) w.at(node, a) = ck * P.at(node, a);
        }
      });
      add_diff(grad, w, k, -2.0);
    }
  }

  if (ball) {
    // (3) pointwise dGamma^N term and (5) pointwise dh term.
    parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
      std::vector<double> y(static_cast<std::size_t>(n)), dh(static_cast<std::size_t>(n));
      std::vector<double> dgn(static_cast<std::size_t>(n) * n * n * n);
      std::vector<double> m(static_cast<std::size_t>(n) * n);
      for (std::int64_t node = b; node < e; ++node) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        u.target().dchristoffel_N(y, dgn);
        u.target().dh_scale(y, dh);
        // m^{dc} = g^{ij} du_i^d du_j^c
        for (int dd = 0; dd < n; ++dd)
          for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i)
              for (int j = 0; j < 4; ++j)
                s += ws.metric.g_inv().at(node, sym_index(i, j)) *
                     md.du.at(node, i * n + dd) * md.du.at(node, j * n + c);
            m[std::size_t(dd) * n + c] = s;
          }
        for (int ecomp = 0; ecomp < n; ++ecomp) {
          double t3 = 0.0;
          for (int bb = 0; bb < n; ++bb)
            for (int dd = 0; dd < n; ++dd)
              for (int c = 0; c < n; ++c)
                t3 += P.at(node, bb) *
                      dgn[((std::size_t(ecomp) * n + bb) * n + dd) * n + c] *
                      m[std::size_t(dd) * n + c];
          double t5 = 0.0;
          {
            double tt = 0.0;
            for (int a = 0; a < n; ++a) tt += md.tau.at(node, a) * md.tau.at(node, a);
            double bdu = 0.0;
            if (include_b)
              for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                  double dot = 0.0;
                  for (int a = 0; a < n; ++a)
                    dot += md.du.at(node, i * n + a) * md.du.at(node, j * n + a);
                  bdu += ws.bup.at(node, sym_index(i, j)) * dot;
                }
            t5 = ws.metric.vol().at(node, 0) * dh[std::size_t(ecomp)] * (tt + bdu);
          }
          grad.at(node, ecomp) += -2.0 * t3 + t5;
        }
      }
    });

    // (4) grad_e += 4 D_i ( g^{ij} Gamma^N b_ec du_j^c P_b )
    std::array<Field, 4> t4;
    for (int i = 0; i < 4; ++i) t4[i] = Field(grid, {RankKind::TargetVector, n});
    parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
      std::vector<double> y(static_cast<std::size_t>(n)), gn(static_cast<std::size_t>(n) * n * n);
      std::vector<double> q(static_cast<std::size_t>(4) * n);
      for (std::int64_t node = b; node < e; ++node) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        u.target().christoffel_N(y, gn);
        // q_j^e = Gamma^b_ec du_j^c P_b
        for (int j = 0; j < 4; ++j)
          for (int ecomp = 0; ecomp < n; ++ecomp) {
            double s = 0.0;
            for (int bb = 0; bb < n; ++bb)
              for (int c = 0; c < n; ++c)
                s += gn[(std::size_t(bb) * n + ecomp) * n + c] * md.du.at(node, j * n + c) *
                     P.at(node, bb);
            q[std::size_t(j) * n + ecomp] = s;
          }
        for (int i = 0; i < 4; ++i)
          for (int ecomp = 0; ecomp < n; ++ecomp) {
            double s = 0.0;
            for (int j = 0; j < 4; ++j)
              s += ws.metric.g_inv().at(node, sym_index(i, j)) * q[std::size_t(j) * n + ecomp];
            t4[i].at(node, ecomp) = s;
          }
      }
    });
    for (int i = 0; i < 4; ++i) add_diff(grad, t4[i], i, 4.0);
  }

  // (6) grad_e -= 2 D_j ( sqrt(g) B^{ij} h du_i^e )
  if (include_b) {
    std::array<Field, 4> t6;
    for (int j = 0; j < 4; ++j) t6[j] = Field(grid, {RankKind::TargetVector, n});
    parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t node = b; node < e; ++node) {
        const double w = ws.metric.vol().at(node, 0) * hscale.at(node, 0);
        for (int j = 0; j < 4; ++j)
          for (int a = 0; a < n; ++a) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i)
              s += ws.bup.at(node, sym_index(i, j)) * md.du.at(node, i * n + a);
            t6[j].at(node, a) = w * s;
          }
      }
    });
    for (int j = 0; j < 4; ++j) add_diff(grad, t6[j], j, -2.0);
  }

  // L^b = h^{ba} grad_a / (2 sqrt g)
  Field out(grid, {RankKind::TargetVector, n});
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node) {
      const double f = 0.5 / (ws.metric.vol().at(node, 0) * hscale.at(node, 0));
      for (int a = 0; a < n; ++a) out.at(node, a) = f * grad.at(node, a);
    }
  });
  return out;
}

} // namespace

Field c_harmonic_operator(const MapField& u, const MetricWorkspace& ws) {
  return energy_gradient(u, ws, true);
}
Field c_harmonic_operator(const MapField& u, const MetricField& g) {
  return c_harmonic_operator(u, MetricWorkspace::make(g));
}
Field biharmonic_operator(const MapField& u, const MetricWorkspace& ws) {
  return energy_gradient(u, ws, false);
}

namespace {

double l2_pairing(const MapField& u, const MetricWorkspace& ws, const Field& s,
                  const Field& w) {
  const int n = u.dim();
  const bool ball = u.target().chart() == SpaceForm::Chart::HyperbolicBall;
  Field dens(u.grid(), {RankKind::Scalar, 1});
  const std::int64_t nodes = u.grid().node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::int64_t node = b; node < e; ++node) {
      double hs = 1.0;
      if (ball) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        hs = u.target().h_scale(y);
      }
      double dot = 0.0;
      for (int a = 0; a < n; ++a) dot += s.at(node, a) * w.at(node, a);
      dens.at(node, 0) = hs * dot;
    }
  });
  return integrate(dens, ws.metric.vol());
}

} // namespace

double gradient_check(const MapField& u, const MetricWorkspace& ws, const Field& v,
                      double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("gradient_check: eps must be positive");
  Field L = c_harmonic_operator(u, ws);
  const double pair = 2.0 * l2_pairing(u, ws, L, v);

  auto perturbed = [&](double sign) {
    Field d = u.disp();
    for (std::int64_t i = 0; i < d.size(); ++i) d[i] += sign * eps * v[i];
    return u.with_disp(std::move(d)); // chart violation throws here
  };
  const double ep = energy_report(perturbed(+1.0), ws).conformal;
  const double em = energy_report(perturbed(-1.0), ws).conformal;
  const double quot = (ep - em) / (2.0 * eps);
  return std::abs(quot - pair) / (std::abs(pair) + kTiny);
}

double gradient_check(const MapField& u, const MetricField& g, const Field& v, double eps) {
  return gradient_check(u, MetricWorkspace::make(g), v, eps);
}

double bochner_residual(const MapField& u, const MetricWorkspace& ws) {
  MapData md = build_map_data(u, ws);
  Densities d = densities(u, ws, md);
  const int n = u.dim();
  const double K = u.target().curvature();
  const bool ball = u.target().chart() == SpaceForm::Chart::HyperbolicBall;

  // Ric(du, du) and the target-curvature contraction
  // sum_ij <R^N(du_i, du_j) du_j, du_i> = K ((tr A)^2 - tr A^2),
  // A^i_k = g^{ij} <du_j, du_k>_h.
  Field ricdu(u.grid(), {RankKind::Scalar, 1});
  Field rn(u.grid(), {RankKind::Scalar, 1});
  const std::int64_t nodes = u.grid().node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    std::vector<double> y(static_cast<std::size_t>(n));
    double A[4][4];
    for (std::int64_t node = b; node < e; ++node) {
      double hs = 1.0;
      if (ball) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        hs = u.target().h_scale(y);
      }
      double rd = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double dot = 0.0;
          for (int a = 0; a < n; ++a)
            dot += md.du.at(node, i * n + a) * md.du.at(node, j * n + a);
          dot *= hs;
          double ric_up = 0.0;
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l)
              ric_up += ws.metric.g_inv().at(node, sym_index(i, k)) *
                        ws.metric.g_inv().at(node, sym_index(j, l)) *
                        ws.rc.ric.at(node, sym_index(k, l));
          rd += ric_up * dot;
        }
      ricdu.at(node, 0) = rd;
      if (K != 0.0) {
        for (int i = 0; i < 4; ++i)
          for (int k = 0; k < 4; ++k) {
            double s = 0.0;
            for (int j = 0; j < 4; ++j) {
              double dot = 0.0;
              for (int a = 0; a < n; ++a)
                dot += md.du.at(node, j * n + a) * md.du.at(node, k * n + a);
              s += ws.metric.g_inv().at(node, sym_index(i, j)) * hs * dot;
            }
            A[i][k] = s;
          }
        double tr = A[0][0] + A[1][1] + A[2][2] + A[3][3];
        double tr2 = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int k = 0; k < 4; ++k) tr2 += A[i][k] * A[k][i];
        rn.at(node, 0) = K * (tr * tr - tr2);
      }
    }
  });
  const double lhs = integrate(d.tau2, ws.metric.vol());
  const double hess2 = integrate(d.hess2, ws.metric.vol());
  const double rn_int = integrate(rn, ws.metric.vol());
  const double ricdu_int = integrate(ricdu, ws.metric.vol());
  const double rhs = hess2 - (rn_int - ricdu_int);
  return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + kTiny);
}

double bochner_residual(const MapField& u, const MetricField& g) {
  return bochner_residual(u, MetricWorkspace::make(g));
}

double coercivity_ratio(const MapField& u, const MetricWorkspace& ws) {
  EnergyReport r = energy_report(u, ws);
  if (!(r.dirichlet > 0.0))
    throw InvalidArgument("coercivity_ratio: ||du|| vanishes (constant map)");
  return r.conformal / r.dirichlet;
}

double coercivity_ratio(const MapField& u, const MetricField& g) {
  return coercivity_ratio(u, MetricWorkspace::make(g));
}

Field trace_free_gap(const MapField& u, const MetricWorkspace& ws) {
  MapData md = build_map_data(u, ws);
  Densities d = densities(u, ws, md);
  Field out(u.grid(), {RankKind::Scalar, 1});
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = d.hess2[i] - 0.25 * d.tau2[i];
  return out;
}

double section_l2_pair(const MapField& u, const MetricWorkspace& ws, const Field& s,
                       const Field& w) {
  return l2_pairing(u, ws, s, w);
}

double oneform_l2_pair(const MapField& u, const MetricWorkspace& ws, const Field& omega,
                       const Field& sigma) {
  const int n = u.dim();
  const bool ball = u.target().chart() == SpaceForm::Chart::HyperbolicBall;
  Field dens(u.grid(), {RankKind::Scalar, 1});
  const std::int64_t nodes = u.grid().node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::int64_t node = b; node < e; ++node) {
      double hs = 1.0;
      if (ball) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        hs = u.target().h_scale(y);
      }
      double acc = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double dot = 0.0;
          for (int a = 0; a < n; ++a)
            dot += omega.at(node, i * n + a) * sigma.at(node, j * n + a);
          acc += ws.metric.g_inv().at(node, sym_index(i, j)) * dot;
        }
      dens.at(node, 0) = hs * acc;
    }
  });
  return integrate(dens, ws.metric.vol());
}

double comparison_constant(const MetricWorkspace& ws) {
  const std::int64_t nodes = ws.grid().node_count();
  double worst = 0.0;
  for (std::int64_t node = 0; node < nodes; ++node) {
    double gm[10], rm[10];
    for (int c = 0; c < 10; ++c) {
      gm[c] = ws.metric.g().at(node, c);
      rm[c] = ws.rc.ric.at(node, c);
    }
    const double op = sym4::pencil_op_norm(gm, rm);
    const double val = std::abs(2.0 / 3.0 * ws.rc.scal.at(node, 0)) + 2.0 * op;
    worst = std::max(worst, val);
  }
  return 2.0 * worst;
}

} // namespace cflow
