#include "cflow/metric.hpp"

#include <cmath>

#include "cflow/parallel.hpp"

namespace cflow {

namespace sym4 {

namespace {
inline double get(const double a[10], int i, int j) { return a[sym_index(i, j)]; }
}

bool cholesky(const double a[10], double l[10]) {
  double m[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = get(a, i, j);
  double L[4][4] = {};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        L[i][i] = std::sqrt(s);
      } else {
        L[i][j] = s / L[j][j];
      }
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) l[sym_index(j, i)] = L[i][j];
  return true;
}

double det_from_cholesky(const double l[10]) {
  double d = get(l, 0, 0) * get(l, 1, 1) * get(l, 2, 2) * get(l, 3, 3);
  return d * d;
}

void inverse_from_cholesky(const double l[10], double inv[10]) {
  double L[4][4] = {};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) L[i][j] = get(l, j, i);
  // Solve L L^T X = I column by column.
  double X[4][4];
  for (int c = 0; c < 4; ++c) {
    double y[4];
    for (int i = 0; i < 4; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= L[i][k] * y[k];
      y[i] = s / L[i][i];
    }
    for (int i = 3; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < 4; ++k) s -= L[k][i] * X[k][c];
      X[i][c] = s / L[i][i];
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) inv[sym_index(i, j)] = 0.5 * (X[i][j] + X[j][i]);
}

void eigenvalues(const double a[10], double ev[4]) {
  double m[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = get(a, i, j);
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) off += m[i][j] * m[i][j];
    if (off < 1e-30) break;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) {
        if (std::abs(m[p][q]) < 1e-300) continue;
        const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double mkp = m[k][p], mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < 4; ++k) {
          const double mpk = m[p][k], mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
      }
  }
  for (int i = 0; i < 4; ++i) ev[i] = m[i][i];
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (ev[j] < ev[i]) std::swap(ev[i], ev[j]);
}

double pencil_op_norm(const double g_[10], const double m[10]) {
  // g^{-1} m is similar to L^{-1} m L^{-T} (symmetric), g = L L^T.
  double l[10];
  if (!cholesky(g_, l)) throw InvalidArgument("pencil_op_norm: metric not PD");
  double L[4][4] = {};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) L[i][j] = get(l, j, i);
  double M[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) M[i][j] = get(m, i, j);
  // Y = L^{-1} M  (forward substitution per column)
  double Y[4][4];
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 4; ++i) {
      double s = M[i][c];
      for (int k = 0; k < i; ++k) s -= L[i][k] * Y[k][c];
      Y[i][c] = s / L[i][i];
    }
  // Z = Y L^{-T}: Z L^T = Y, solve per row.
  double Z[10];
  double Zr[4][4];
  for (int r = 0; r < 4; ++r)
    for (int i = 0; i < 4; ++i) {
      double s = Y[r][i];
      for (int k = 0; k < i; ++k) s -= L[i][k] * Zr[r][k];
      Zr[r][i] = s / L[i][i];
    }
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) Z[sym_index(i, j)] = 0.5 * (Zr[i][j] + Zr[j][i]);
  double ev[4];
  eigenvalues(Z, ev);
  return std::max(std::abs(ev[0]), std::abs(ev[3]));
}

} // namespace sym4

namespace {

bool identity_everywhere(const Field& g) {
  const std::int64_t n = g.grid().node_count();
  for (std::int64_t node = 0; node < n; ++node)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        const double want = (i == j) ? 1.0 : 0.0;
        if (std::abs(g.at(node, sym_index(i, j)) - want) > 1e-14) return false;
      }
  return true;
}

} // namespace

MetricField MetricField::flat(const Grid4& grid) {
  Field g(grid, {RankKind::Sym2, 1});
  Field ginv(grid, {RankKind::Sym2, 1});
  Field vol(grid, {RankKind::Scalar, 1}, 1.0);
  const std::int64_t n = grid.node_count();
  for (std::int64_t node = 0; node < n; ++node)
    for (int i = 0; i < 4; ++i) {
      g.at(node, sym_index(i, i)) = 1.0;
      ginv.at(node, sym_index(i, i)) = 1.0;
    }
  return MetricField(std::move(g), std::move(ginv), std::move(vol), true);
}

MetricField MetricField::from_components(Field g) {
  if (g.rank().kind != RankKind::Sym2)
    throw InvalidArgument("MetricField: Sym2 field required");
  if (!g.all_finite()) throw InvalidArgument("MetricField: non-finite metric");
  const Grid4& grid = g.grid();
  Field ginv(grid, {RankKind::Sym2, 1});
  Field vol(grid, {RankKind::Scalar, 1});
  const std::int64_t n = grid.node_count();
  for (std::int64_t node = 0; node < n; ++node) {
    double a[10], l[10], inv[10];
    for (int c = 0; c < 10; ++c) a[c] = g.at(node, c);
    if (!sym4::cholesky(a, l))
      throw InvalidArgument("MetricField: metric not positive-definite at node " +
                            std::to_string(node));
    sym4::inverse_from_cholesky(l, inv);
    for (int c = 0; c < 10; ++c) ginv.at(node, c) = inv[c];
    vol.at(node, 0) = std::sqrt(sym4::det_from_cholesky(l));
  }
  const bool flat = identity_everywhere(g);
  return MetricField(std::move(g), std::move(ginv), std::move(vol), flat);
}

double MetricField::inverse_eig_sq_max() const {
  const std::int64_t n = grid().node_count();
  double worst = 0.0;
  for (std::int64_t node = 0; node < n; ++node) {
    double a[10], ev[4];
    for (int c = 0; c < 10; ++c) a[c] = ginv_.at(node, c);
    sym4::eigenvalues(a, ev);
    worst = std::max(worst, ev[3]);
  }
  return worst * worst;
}

MetricField conformal_metric(const Field& phi, const MetricField& base) {
  if (phi.rank().kind != RankKind::Scalar)
    throw InvalidArgument("conformal_metric: scalar phi required");
  if (!(phi.grid() == base.grid()))
    throw InvalidArgument("conformal_metric: grid mismatch");
  if (!phi.all_finite() || phi.max_abs() > 20.0)
    throw InvalidArgument("conformal_metric: |phi| must be finite and <= 20");
  Field g(base.grid(), {RankKind::Sym2, 1});
  const std::int64_t n = base.grid().node_count();
  for (std::int64_t node = 0; node < n; ++node) {
    const double f = std::exp(2.0 * phi.at(node, 0));
    for (int c = 0; c < 10; ++c) g.at(node, c) = f * base.g().at(node, c);
  }
  return MetricField::from_components(std::move(g));
}

} // namespace cflow
