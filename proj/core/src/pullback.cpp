#include "cflow/pullback.hpp"

#include <vector>

#include "cflow/curvature.hpp"
#include "cflow/parallel.hpp"

namespace cflow {

namespace {
inline int gidx(int k, int i, int j) { return k * 10 + sym_index(i, j); }
}

Field pullback_derivative(const MapField& u, const Field& omega, const Field& gamma,
                          const Field& du) {
  const int n = u.dim();
  if (omega.rank().kind != RankKind::OneForm || omega.rank().dim != n)
    throw InvalidArgument("pullback_derivative: OneForm of matching dim required");
  Field out(u.grid(), {RankKind::TwoTensor, n});

  // d_i omega_j^a
  for (int i = 0; i < 4; ++i) {
    Field d = diff(omega, i, 1);
    const std::int64_t nodes = u.grid().node_count();
    parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t node = b; node < e; ++node)
        for (int j = 0; j < 4; ++j)
          for (int a = 0; a < n; ++a)
            out.at(node, (i * 4 + j) * n + a) = d.at(node, j * n + a);
    });
  }

  const bool ball = u.target().chart() == SpaceForm::Chart::HyperbolicBall;
  const std::int64_t nodes = u.grid().node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    std::vector<double> gn(static_cast<std::size_t>(n) * n * n);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::int64_t node = b; node < e; ++node) {
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          const int gi = gidx(0, i, j) % 10;
          for (int a = 0; a < n; ++a) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k)
              s += gamma.at(node, k * 10 + gi) * omega.at(node, k * n + a);
            out.at(node, (i * 4 + j) * n + a) -= s;
          }
        }
      if (ball) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        u.target().christoffel_N(y, gn);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            for (int a = 0; a < n; ++a) {
              double s = 0.0;
              for (int bb = 0; bb < n; ++bb)
                for (int c = 0; c < n; ++c)
                  s += gn[(std::size_t(a) * n + bb) * n + c] * du.at(node, i * n + bb) *
                       omega.at(node, j * n + c);
              out.at(node, (i * 4 + j) * n + a) += s;
            }
      }
    }
  });
  return out;
}

Field pullback_derivative(const MapField& u, const Field& omega, const MetricField& g) {
  return pullback_derivative(u, omega, christoffels(g), differential(u));
}

Field tension(const MapField& u, const MetricField& g) {
  Field du = differential(u);
  Field hess = pullback_derivative(u, du, christoffels(g), du);
  return tension_from(g.g_inv(), hess);
}

Field tension_from(const Field& ginv, const Field& hess) {
  const int n = hess.rank().dim;
  Field tau(hess.grid(), {RankKind::TargetVector, n});
  const std::int64_t nodes = hess.grid().node_count();
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node)
      for (int a = 0; a < n; ++a) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            s += ginv.at(node, sym_index(i, j)) * hess.at(node, (i * 4 + j) * n + a);
        tau.at(node, a) = -s;
      }
  });
  return tau;
}

Field connection_on_section(const MapField& u, const Field& s, const Field& du) {
  const int n = u.dim();
  if (s.rank().kind != RankKind::TargetVector || s.rank().dim != n)
    throw InvalidArgument("connection_on_section: TargetVector of matching dim required");
  Field out(u.grid(), {RankKind::OneForm, n});
  for (int i = 0; i < 4; ++i) {
    Field d = diff(s, i, 1);
    const std::int64_t nodes = u.grid().node_count();
    parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t node = b; node < e; ++node)
        for (int a = 0; a < n; ++a) out.at(node, i * n + a) = d.at(node, a);
    });
  }
  if (u.target().chart() == SpaceForm::Chart::HyperbolicBall) {
    const std::int64_t nodes = u.grid().node_count();
    parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
      std::vector<double> gn(static_cast<std::size_t>(n) * n * n);
      std::vector<double> y(static_cast<std::size_t>(n));
      for (std::int64_t node = b; node < e; ++node) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        u.target().christoffel_N(y, gn);
        for (int i = 0; i < 4; ++i)
          for (int a = 0; a < n; ++a) {
            double acc = 0.0;
            for (int bb = 0; bb < n; ++bb)
              for (int c = 0; c < n; ++c)
                acc += gn[(std::size_t(a) * n + bb) * n + c] * du.at(node, i * n + bb) *
                       s.at(node, c);
            out.at(node, i * n + a) += acc;
          }
      }
    });
  }
  return out;
}

Field connection_on_section(const MapField& u, const Field& s, const MetricField& g) {
  (void)g; // the connection needs only du and the target geometry
  return connection_on_section(u, s, differential(u));
}

Field adjoint_div(const MapField& u, const Field& omega, const MetricField& g,
                  const Field& du) {
  const int n = u.dim();
  if (omega.rank().kind != RankKind::OneForm || omega.rank().dim != n)
    throw InvalidArgument("adjoint_div: OneForm of matching dim required");
  const std::int64_t nodes = u.grid().node_count();

  // w_i^a = sqrt(g) g^{ij} omega_j^a, then out = -(1/sqrt g) sum_i D_i w_i.
  Field w(u.grid(), {RankKind::OneForm, n});
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t node = b; node < e; ++node) {
      const double sg = g.vol().at(node, 0);
      for (int i = 0; i < 4; ++i)
        for (int a = 0; a < n; ++a) {
          double s = 0.0;
          for (int j = 0; j < 4; ++j)
            s += g.g_inv().at(node, sym_index(i, j)) * omega.at(node, j * n + a);
          w.at(node, i * n + a) = sg * s;
        }
    }
  });
  Field div(u.grid(), {RankKind::TargetVector, n});
  for (int i = 0; i < 4; ++i) {
    Field slice(u.grid(), {RankKind::TargetVector, n});
    parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t node = b; node < e; ++node)
        for (int a = 0; a < n; ++a) slice.at(node, a) = w.at(node, i * n + a);
    });
    add_diff(div, slice, i, 1.0);
  }

  Field out(u.grid(), {RankKind::TargetVector, n});
  const bool ball = u.target().chart() == SpaceForm::Chart::HyperbolicBall;
  parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
    std::vector<double> gn(static_cast<std::size_t>(n) * n * n);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::int64_t node = b; node < e; ++node) {
      const double inv_sg = 1.0 / g.vol().at(node, 0);
      for (int a = 0; a < n; ++a) out.at(node, a) = -inv_sg * div.at(node, a);
      if (ball) {
        for (int a = 0; a < n; ++a) y[std::size_t(a)] = u.disp().at(node, a);
        u.target().christoffel_N(y, gn);
        for (int a = 0; a < n; ++a) {
          double acc = 0.0;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
              const double gij = g.g_inv().at(node, sym_index(i, j));
              for (int bb = 0; bb < n; ++bb)
                for (int c = 0; c < n; ++c)
                  acc += gij * gn[(std::size_t(a) * n + bb) * n + c] *
                         du.at(node, i * n + bb) * omega.at(node, j * n + c);
            }
          out.at(node, a) -= acc;
        }
      }
    }
  });
  return out;
}

Field adjoint_div(const MapField& u, const Field& omega, const MetricField& g) {
  return adjoint_div(u, omega, g, differential(u));
}

Field rough_laplacian(const MapField& u, const Field& s, const MetricField& g) {
  Field du = differential(u);
  return adjoint_div(u, connection_on_section(u, s, du), g, du);
}

} // namespace cflow
