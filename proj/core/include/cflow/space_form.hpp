#pragma once

#include <span>
#include <vector>

#include "cflow/errors.hpp"

namespace cflow {

/// The target (N, h) as a constant-curvature space form with K <= 0, in an
/// explicit chart: flat torus (K = 0, periodic coordinates) or hyperbolic
/// space (K < 0, Poincare ball rescaled so the sectional curvature is K).
/// All geometric quantities have closed forms; no differencing on N.
class SpaceForm {
public:
  enum class Chart { FlatTorus, HyperbolicBall };

  static SpaceForm flat_torus(int dim, std::vector<double> periods);
  static SpaceForm hyperbolic_ball(int dim, double K);

  int dim() const { return dim_; }
  double curvature() const { return K_; }
  Chart chart() const { return chart_; }
  const std::vector<double>& periods() const { return periods_; }

  /// Distance from the chart boundary below which the flow is declared
  /// divergent (ball chart only).
  static constexpr double boundary_guard = 1e-6;

  /// True when y is a valid chart point (ball: |y| < 1 - guard).
  bool contains(std::span<const double> y) const;

  /// Metric h_ab at y: identity for the torus, (4 / (-K (1-|y|^2)^2)) Id for
  /// the ball. Row-major dim x dim.
  std::vector<double> metric_h(std::span<const double> y) const;
  /// Conformal scale c(y) with h = c * Id (1 for the torus).
  double h_scale(std::span<const double> y) const;
  /// d c / d y^c, zero for the torus.
  void dh_scale(std::span<const double> y, std::span<double> out) const;

  /// Christoffel symbols Gamma^a_bc at y, packed (a * dim + b) * dim + c.
  std::vector<double> christoffel_N(std::span<const double> y) const;
  void christoffel_N(std::span<const double> y, std::span<double> out) const;
  /// Derivatives d_d Gamma^a_bc, packed ((d * dim + a) * dim + b) * dim + c.
  void dchristoffel_N(std::span<const double> y, std::span<double> out) const;

  /// Curvature operator R^N(X, Y) Z = K (<Y,Z>_h X - <X,Z>_h Y) at y.
  std::vector<double> curv_op(std::span<const double> y, std::span<const double> X,
                              std::span<const double> Y, std::span<const double> Z) const;

  /// Chart maintenance: torus coordinates reduced mod periods; ball
  /// coordinates validated against the boundary guard (throws FlowDiverged).
  std::vector<double> wrap(std::span<const double> y) const;

  bool operator==(const SpaceForm&) const = default;

private:
  SpaceForm(Chart c, int dim, double K, std::vector<double> periods);
  Chart chart_ = Chart::FlatTorus;
  int dim_ = 1;
  double K_ = 0.0;
  std::vector<double> periods_;
};

} // namespace cflow
