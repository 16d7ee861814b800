#pragma once

#include <array>
#include <vector>

#include "cflow/grid.hpp"
#include "cflow/space_form.hpp"

namespace cflow {

/// Integer linear part of a torus map: A[a][i] is the winding of target
/// coordinate a around source axis i. The zero matrix for ball targets.
using LinearPart = std::vector<std::array<int, 4>>;

/// A map u : M -> N stored as an integer linear part A plus a periodic
/// displacement field v, u(x) = A x + v(x) for torus targets and u = v for
/// the ball. The linear part encodes the homotopy class and is immutable for
/// the lifetime of the map; flows evolve only the displacement.
class MapField {
public:
  MapField(const Grid4& grid, SpaceForm target, LinearPart linear_part, Field disp);

  const Grid4& grid() const { return disp_.grid(); }
  const SpaceForm& target() const { return target_; }
  const LinearPart& linear_part() const { return linear_part_; }
  const Field& disp() const { return disp_; }
  int dim() const { return target_.dim(); }

  /// Chart coordinates of u at a node (torus: A x + v reduced mod periods).
  void point(std::int64_t node, std::span<double> out) const;

  /// Replaces the displacement, revalidating the chart; the linear part is
  /// carried over unchanged.
  MapField with_disp(Field disp) const;

  /// Throws FlowDiverged if any node violates the ball boundary guard or is
  /// non-finite. No-op for torus targets.
  static void validate_chart(const SpaceForm& target, const Field& disp);

private:
  SpaceForm target_;
  LinearPart linear_part_;
  Field disp_;
};

/// du as a pullback one-form: components (i * n + a) = A[a][i] + D_i v^a.
/// Central differences; exact for affine torus maps.
Field differential(const MapField& u);

} // namespace cflow
