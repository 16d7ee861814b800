#include "cflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cflow/parallel.hpp"

namespace cflow {

Grid4::Grid4(std::array<int, 4> dims_, std::array<double, 4> lengths_)
    : dims(dims_), lengths(lengths_) {
  for (int a = 0; a < 4; ++a) {
    if (dims[a] < 8 || dims[a] % 2 != 0)
      throw InvalidArgument("Grid4: dims[" + std::to_string(a) +
                            "] must be even and >= 8, got " + std::to_string(dims[a]));
    if (!(lengths[a] > 0.0))
      throw InvalidArgument("Grid4: lengths[" + std::to_string(a) + "] must be positive");
    spacing[a] = lengths[a] / dims[a];
  }
}

std::int64_t Grid4::stride(int axis) const {
  switch (axis) {
    case 0: return std::int64_t(dims[1]) * dims[2] * dims[3];
    case 1: return std::int64_t(dims[2]) * dims[3];
    case 2: return dims[3];
    case 3: return 1;
    default: throw InvalidArgument("Grid4::stride: axis out of range");
  }
}

std::array<int, 4> Grid4::unpack(std::int64_t node) const {
  std::array<int, 4> idx;
  idx[3] = int(node % dims[3]); node /= dims[3];
  idx[2] = int(node % dims[2]); node /= dims[2];
  idx[1] = int(node % dims[1]); node /= dims[1];
  idx[0] = int(node);
  return idx;
}

std::int64_t Grid4::pack(const std::array<int, 4>& idx) const {
  return ((std::int64_t(idx[0]) * dims[1] + idx[1]) * dims[2] + idx[2]) * dims[3] + idx[3];
}

double Grid4::min_spacing() const {
  return *std::min_element(spacing.begin(), spacing.end());
}

int Rank::components() const {
  switch (kind) {
    case RankKind::Scalar: return 1;
    case RankKind::Vector: return 4;
    case RankKind::Sym2: return 10;
    case RankKind::Mat: return 16;
    case RankKind::Christoffel: return 40;
    case RankKind::Riemann: return 256;
    case RankKind::TargetVector: return dim;
    case RankKind::OneForm: return 4 * dim;
    case RankKind::TwoTensor: return 16 * dim;
  }
  return 1;
}

std::string Rank::kind_name() const {
  switch (kind) {
    case RankKind::Scalar: return "scalar";
    case RankKind::Vector: return "vector";
    case RankKind::Sym2: return "sym2";
    case RankKind::Mat: return "mat";
    case RankKind::Christoffel: return "christoffel";
    case RankKind::Riemann: return "riemann";
    case RankKind::TargetVector: return "target_vector";
    case RankKind::OneForm: return "one_form";
    case RankKind::TwoTensor: return "two_tensor";
  }
  return "scalar";
}

Rank Rank::from_kind_name(const std::string& name, int dim) {
  if (name == "scalar") return {RankKind::Scalar, 1};
  if (name == "vector") return {RankKind::Vector, 1};
  if (name == "sym2") return {RankKind::Sym2, 1};
  if (name == "mat") return {RankKind::Mat, 1};
  if (name == "christoffel") return {RankKind::Christoffel, 1};
  if (name == "riemann") return {RankKind::Riemann, 1};
  if (name == "target_vector") return {RankKind::TargetVector, dim};
  if (name == "one_form") return {RankKind::OneForm, dim};
  if (name == "two_tensor") return {RankKind::TwoTensor, dim};
  throw InvalidArgument("unknown rank kind: " + name);
}

Field::Field(const Grid4& grid, Rank rank, double init)
    : grid_(grid), rank_(rank), comps_(rank.components()),
      values_(std::size_t(grid.node_count()) * comps_, init) {
  if (comps_ <= 0) throw InvalidArgument("Field: rank with zero components");
}

bool Field::all_finite() const {
  for (double x : values_)
    if (!std::isfinite(x)) return false;
  return true;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

namespace {

// One pass of out (+)= scale * sum_t coeff_t * shift(f, tap_t) along `axis`.
// The lattice factors as (outer, axis, inner) with inner = stride(axis)
// contiguous nodes, so each (outer, ia, tap) contribution is a contiguous
// block AXPY of length stride * comps.
template <int NTAPS>
void stencil_pass(Field& out, const Field& f, int axis,
                  const std::array<std::pair<int, double>, NTAPS>& taps,
                  bool accumulate, double scale) {
  const Grid4& g = f.grid();
  const int n = g.dims[axis];
  const std::int64_t stride = g.stride(axis);
  const std::int64_t block = stride * f.components();
  const std::int64_t outer = g.node_count() / (std::int64_t(n) * stride);

  parallel_for(outer * n, [&](std::int64_t b, std::int64_t e) {
    const double* in = f.data();
    double* o = out.data();
    for (std::int64_t u = b; u < e; ++u) {
      const std::int64_t oi = u / n;
      const int ia = int(u % n);
      double* dst = o + (oi * n + ia) * block;
      if (!accumulate)
        for (std::int64_t k = 0; k < block; ++k) dst[k] = 0.0;
      for (int t = 0; t < NTAPS; ++t) {
        int ja = ia + taps[t].first;
        if (ja >= n) ja -= n;
        if (ja < 0) ja += n;
        const double* src = in + (oi * n + ja) * block;
        const double c = scale * taps[t].second;
        for (std::int64_t k = 0; k < block; ++k) dst[k] += c * src[k];
      }
    }
  });
}

} // namespace

Field diff(const Field& f, int axis, int order) {
  if (axis < 0 || axis > 3) throw InvalidArgument("diff: axis out of range");
  if (order != 1 && order != 2) throw InvalidArgument("diff: order must be 1 or 2");
  if (!f.all_finite()) throw InvalidArgument("diff: non-finite input field");
  Field out(f.grid(), f.rank());
  const double h = f.grid().spacing[axis];
  if (order == 1) {
    stencil_pass<2>(out, f, axis, {{{+1, 1.0}, {-1, -1.0}}}, false, 1.0 / (2.0 * h));
  } else {
    stencil_pass<3>(out, f, axis, {{{+2, 1.0}, {0, -2.0}, {-2, 1.0}}}, false,
                    1.0 / (4.0 * h * h));
  }
  return out;
}

void add_diff(Field& out, const Field& f, int axis, double scale) {
  const double h = f.grid().spacing[axis];
  stencil_pass<2>(out, f, axis, {{{+1, 1.0}, {-1, -1.0}}}, true, scale / (2.0 * h));
}

double integrate(const Field& f, const Field& vol) {
  if (f.rank().kind != RankKind::Scalar || vol.rank().kind != RankKind::Scalar)
    throw InvalidArgument("integrate: scalar fields required");
  if (!(f.grid() == vol.grid()))
    throw InvalidArgument("integrate: grid mismatch");
  const Grid4& g = f.grid();
  double cell = g.spacing[0] * g.spacing[1] * g.spacing[2] * g.spacing[3];
  const double* fv = f.data();
  const double* vv = vol.data();
  const std::int64_t n = g.node_count();
  for (std::int64_t i = 0; i < n; ++i)
    if (!(vv[i] > 0.0))
      throw InvalidArgument("integrate: non-positive volume density");
  double s = parallel_sum(n, [&](std::int64_t b, std::int64_t e) {
    std::vector<double> tmp(std::size_t(e - b));
    for (std::int64_t i = b; i < e; ++i) tmp[std::size_t(i - b)] = fv[i] * vv[i];
    return pairwise_sum(tmp);
  });
  return s * cell;
}

double integrate(const Field& f) {
  const Grid4& g = f.grid();
  double cell = g.spacing[0] * g.spacing[1] * g.spacing[2] * g.spacing[3];
  const double* fv = f.data();
  double s = parallel_sum(f.size(), [&](std::int64_t b, std::int64_t e) {
    return pairwise_sum(std::span<const double>(fv + b, std::size_t(e - b)));
  });
  return s * cell;
}

double max_norm(const Field& f) { return f.max_abs(); }

} // namespace cflow
