#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cflow/errors.hpp"

namespace cflow {

/// Periodic 4-dimensional lattice. dims[i] nodes per axis (even, >= 8, so the
/// spectral transform path is always available), lengths[i] the period,
/// spacing[i] = lengths[i] / dims[i]. Node storage is row-major with axis 3
/// fastest; that layout is part of the field container format.
struct Grid4 {
  std::array<int, 4> dims{};
  std::array<double, 4> lengths{};
  std::array<double, 4> spacing{};

  Grid4() = default;
  Grid4(std::array<int, 4> dims_, std::array<double, 4> lengths_);

  std::int64_t node_count() const {
    return std::int64_t(dims[0]) * dims[1] * dims[2] * dims[3];
  }
  /// Stride (in nodes) of one step along `axis`.
  std::int64_t stride(int axis) const;
  /// Coordinate of node index i along `axis` (in [0, length)).
  double coord(int axis, int i) const { return spacing[axis] * i; }
  /// Decomposes a flat node index into per-axis indices.
  std::array<int, 4> unpack(std::int64_t node) const;
  std::int64_t pack(const std::array<int, 4>& idx) const;

  double min_spacing() const;
  bool operator==(const Grid4&) const = default;
};

enum class RankKind {
  Scalar,       // 1 component
  Vector,       // 4 (an M-index)
  Sym2,         // 10, symmetric pairs (i<=j) of M-indices
  Mat,          // 16, two M-indices unsymmetrized
  Christoffel,  // 40, Gamma^k_(ij) with (i<=j)
  Riemann,      // 256, R^k_lij full
  TargetVector, // n, a section of u*TN in chart components
  OneForm,      // 4*n, (M-index, N-index)
  TwoTensor,    // 16*n, (M-index, M-index, N-index)
};

/// Rank descriptor: kind plus the target fiber dimension where applicable.
struct Rank {
  RankKind kind = RankKind::Scalar;
  int dim = 1; // target dimension for TargetVector/OneForm/TwoTensor

  int components() const;
  std::string kind_name() const;
  static Rank from_kind_name(const std::string& name, int dim);
  bool operator==(const Rank&) const = default;
};

/// Index of the (i,j) pair in symmetric 10-component storage, i,j in 0..3.
inline int sym_index(int i, int j) {
  static constexpr int tab[4][4] = {
      {0, 1, 2, 3}, {1, 4, 5, 6}, {2, 5, 7, 8}, {3, 6, 8, 9}};
  return tab[i][j];
}

/// Dense field of doubles over a Grid4: node-major, components fastest.
class Field {
public:
  Field() = default;
  Field(const Grid4& grid, Rank rank, double init = 0.0);

  const Grid4& grid() const { return grid_; }
  const Rank& rank() const { return rank_; }
  int components() const { return comps_; }
  std::int64_t size() const { return std::int64_t(values_.size()); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double& operator[](std::int64_t i) { return values_[i]; }
  double operator[](std::int64_t i) const { return values_[i]; }
  double& at(std::int64_t node, int comp) { return values_[node * comps_ + comp]; }
  double at(std::int64_t node, int comp) const { return values_[node * comps_ + comp]; }

  bool all_finite() const;
  double max_abs() const;

private:
  Grid4 grid_;
  Rank rank_;
  int comps_ = 1;
  std::vector<double> values_;
};

/// Central first difference (order 1) or its self-composition (order 2),
/// component-wise along `axis` with periodic wraparound. Second-order
/// accurate; order-2 is the wide stencil (f(+2h) - 2f + f(-2h)) / (4h^2) so
/// the discrete Hessian formed by composing first differences is symmetric.
Field diff(const Field& f, int axis, int order = 1);

/// In-place accumulating variant: out += scale * D_axis(f), no allocation.
void add_diff(Field& out, const Field& f, int axis, double scale);

/// Metric-weighted quadrature: sum of f * vol * prod(spacing). Exact for
/// constants; spectrally accurate for smooth periodic integrands.
double integrate(const Field& f, const Field& vol);

/// Plain lattice sum of f * prod(spacing) (unit volume density).
double integrate(const Field& f);

/// L-infinity norm over all values.
double max_norm(const Field& f);

} // namespace cflow
