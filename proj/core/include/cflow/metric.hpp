#pragma once

#include "cflow/grid.hpp"

namespace cflow {

/// Metric on the lattice: g as a symmetric 2-tensor field (10 components per
/// node), with the cached pointwise inverse and volume density sqrt(det g).
/// Construction verifies positive-definiteness node by node (Cholesky).
class MetricField {
public:
  /// Flat metric: g = delta.
  static MetricField flat(const Grid4& grid);
  /// General metric from a Sym2 field; computes caches, rejects non-PD nodes.
  static MetricField from_components(Field g);

  const Grid4& grid() const { return g_.grid(); }
  const Field& g() const { return g_; }
  const Field& g_inv() const { return ginv_; }
  const Field& vol() const { return vol_; }

  /// True when g is numerically the identity at every node (within 1e-14);
  /// lets downstream operators skip exactly-zero curvature work.
  bool is_flat() const { return flat_; }

  /// Max over nodes of (largest eigenvalue of g^{-1})^2; the metric factor in
  /// the explicit fourth-order CFL bound.
  double inverse_eig_sq_max() const;

private:
  MetricField(Field g, Field ginv, Field vol, bool flat)
      : g_(std::move(g)), ginv_(std::move(ginv)), vol_(std::move(vol)), flat_(flat) {}
  Field g_;
  Field ginv_;
  Field vol_;
  bool flat_ = false;
};

/// Conformal change: returns e^{2 phi} * base with caches recomputed.
/// Throws when |phi| exceeds 20 (e^{2 phi} overflow guard).
MetricField conformal_metric(const Field& phi, const MetricField& base);

// Small symmetric 4x4 helpers on 10-component packed storage (i<=j order
// 00,01,02,03,11,12,13,22,23,33). Throw on non-PD input where noted.
namespace sym4 {
/// Cholesky factor L (lower, packed row-major 10) of a PD matrix; returns
/// false if the matrix is not positive-definite.
bool cholesky(const double a[10], double l[10]);
double det_from_cholesky(const double l[10]);
/// Inverse of a PD matrix via its Cholesky factor.
void inverse_from_cholesky(const double l[10], double inv[10]);
/// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending order.
void eigenvalues(const double a[10], double ev[4]);
/// max |eigenvalue| of g^{-1} m (both symmetric, g PD): the operator norm of
/// m with indices measured by g.
double pencil_op_norm(const double g_[10], const double m[10]);
} // namespace sym4

} // namespace cflow
