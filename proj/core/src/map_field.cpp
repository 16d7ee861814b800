#include "cflow/map_field.hpp"

#include <cmath>

#include "cflow/parallel.hpp"

namespace cflow {

MapField::MapField(const Grid4& grid, SpaceForm target, LinearPart linear_part, Field disp)
    : target_(std::move(target)), linear_part_(std::move(linear_part)), disp_(std::move(disp)) {
  const int n = target_.dim();
  if (!(disp_.grid() == grid)) throw InvalidArgument("MapField: displacement grid mismatch");
  if (disp_.rank().kind != RankKind::TargetVector || disp_.rank().dim != n)
    throw InvalidArgument("MapField: displacement must be a TargetVector field of dim " +
                          std::to_string(n));
  if (int(linear_part_.size()) != n)
    throw InvalidArgument("MapField: linear part must have one row per target dimension");
  if (target_.chart() == SpaceForm::Chart::HyperbolicBall) {
    for (const auto& row : linear_part_)
      for (int v : row)
        if (v != 0)
          throw InvalidArgument("MapField: ball targets require a zero linear part");
  }
  validate_chart(target_, disp_);
}

void MapField::validate_chart(const SpaceForm& target, const Field& disp) {
  if (!disp.all_finite()) throw FlowDiverged("MapField: non-finite displacement");
  if (target.chart() != SpaceForm::Chart::HyperbolicBall) return;
  const int n = target.dim();
  const std::int64_t nodes = disp.grid().node_count();
  const double limit = 1.0 - SpaceForm::boundary_guard;
  for (std::int64_t node = 0; node < nodes; ++node) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double v = disp.at(node, a);
      r2 += v * v;
    }
    if (!(std::sqrt(r2) < limit))
      throw FlowDiverged("MapField: node " + std::to_string(node) +
                         " violates the ball boundary guard");
  }
}

void MapField::point(std::int64_t node, std::span<double> out) const {
  const int n = dim();
  for (int a = 0; a < n; ++a) out[a] = disp_.at(node, a);
  if (target_.chart() == SpaceForm::Chart::FlatTorus) {
    const auto idx = grid().unpack(node);
    for (int a = 0; a < n; ++a) {
      double y = out[a];
      for (int i = 0; i < 4; ++i) y += linear_part_[std::size_t(a)][i] * grid().coord(i, idx[i]);
      const double p = target_.periods()[std::size_t(a)];
      y = std::fmod(y, p);
      if (y < 0.0) y += p;
      out[a] = y;
    }
  }
}

MapField MapField::with_disp(Field disp) const {
  return MapField(grid(), target_, linear_part_, std::move(disp));
}

Field differential(const MapField& u) {
  const int n = u.dim();
  Field du(u.grid(), {RankKind::OneForm, n});
  for (int i = 0; i < 4; ++i) {
    Field d = diff(u.disp(), i, 1);
    const std::int64_t nodes = u.grid().node_count();
    parallel_for(nodes, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t node = b; node < e; ++node)
        for (int a = 0; a < n; ++a)
          du.at(node, i * n + a) = u.linear_part()[std::size_t(a)][i] + d.at(node, a);
    });
  }
  return du;
}

} // namespace cflow
