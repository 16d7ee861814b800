#include "cflow/space_form.hpp"

#include <cmath>
#include <string>

namespace cflow {

SpaceForm::SpaceForm(Chart c, int dim, double K, std::vector<double> periods)
    : chart_(c), dim_(dim), K_(K), periods_(std::move(periods)) {}

SpaceForm SpaceForm::flat_torus(int dim, std::vector<double> periods) {
  if (dim < 1) throw InvalidArgument("SpaceForm: dim must be >= 1");
  if (int(periods.size()) != dim)
    throw InvalidArgument("SpaceForm: torus needs one period per dimension");
  for (double p : periods)
    if (!(p > 0.0)) throw InvalidArgument("SpaceForm: periods must be positive");
  return SpaceForm(Chart::FlatTorus, dim, 0.0, std::move(periods));
}

SpaceForm SpaceForm::hyperbolic_ball(int dim, double K) {
  if (dim < 1) throw InvalidArgument("SpaceForm: dim must be >= 1");
  if (!(K < 0.0)) throw InvalidArgument("SpaceForm: hyperbolic ball requires K < 0");
  return SpaceForm(Chart::HyperbolicBall, dim, K, {});
}

namespace {
double norm2(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}
} // namespace

bool SpaceForm::contains(std::span<const double> y) const {
  if (int(y.size()) != dim_) return false;
  if (chart_ == Chart::FlatTorus) return true;
  return std::sqrt(norm2(y)) < 1.0 - boundary_guard;
}

double SpaceForm::h_scale(std::span<const double> y) const {
  if (chart_ == Chart::FlatTorus) return 1.0;
  const double r2 = norm2(y);
  if (!(r2 < 1.0)) throw InvalidArgument("SpaceForm: point outside ball chart");
  const double d = 1.0 - r2;
  return 4.0 / ((-K_) * d * d);
}

void SpaceForm::dh_scale(std::span<const double> y, std::span<double> out) const {
  if (chart_ == Chart::FlatTorus) {
    for (int i = 0; i < dim_; ++i) out[i] = 0.0;
    return;
  }
  const double r2 = norm2(y);
  const double d = 1.0 - r2;
  const double f = 16.0 / ((-K_) * d * d * d);
  for (int i = 0; i < dim_; ++i) out[i] = f * y[i];
}

std::vector<double> SpaceForm::metric_h(std::span<const double> y) const {
  const double c = h_scale(y);
  std::vector<double> h(std::size_t(dim_) * dim_, 0.0);
  for (int i = 0; i < dim_; ++i) h[std::size_t(i) * dim_ + i] = c;
  return h;
}

void SpaceForm::christoffel_N(std::span<const double> y, std::span<double> out) const {
  const int n = dim_;
  if (chart_ == Chart::FlatTorus) {
    for (std::size_t i = 0; i < std::size_t(n) * n * n; ++i) out[i] = 0.0;
    return;
  }
  const double f = 2.0 / (1.0 - norm2(y));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = 0.0;
        if (a == b) v += y[c];
        if (a == c) v += y[b];
        if (b == c) v -= y[a];
        out[(std::size_t(a) * n + b) * n + c] = f * v;
      }
}

std::vector<double> SpaceForm::christoffel_N(std::span<const double> y) const {
  std::vector<double> out(std::size_t(dim_) * dim_ * dim_);
  christoffel_N(y, out);
  return out;
}

void SpaceForm::dchristoffel_N(std::span<const double> y, std::span<double> out) const {
  const int n = dim_;
  if (chart_ == Chart::FlatTorus) {
    for (std::size_t i = 0; i < std::size_t(n) * n * n * n; ++i) out[i] = 0.0;
    return;
  }
  const double f = 2.0 / (1.0 - norm2(y));
  // d_d (f * G0^a_bc) = f * d_d G0 + f^2 y_d G0, since d_d f = f^2 y_d.
  for (int d = 0; d < n; ++d)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double g0 = 0.0;
          if (a == b) g0 += y[c];
          if (a == c) g0 += y[b];
          if (b == c) g0 -= y[a];
          double dg0 = 0.0;
          if (a == b && c == d) dg0 += 1.0;
          if (a == c && b == d) dg0 += 1.0;
          if (b == c && a == d) dg0 -= 1.0;
          out[((std::size_t(d) * n + a) * n + b) * n + c] = f * dg0 + f * f * y[d] * g0;
        }
}

std::vector<double> SpaceForm::curv_op(std::span<const double> y, std::span<const double> X,
                                       std::span<const double> Y,
                                       std::span<const double> Z) const {
  std::vector<double> out(std::size_t(dim_), 0.0);
  if (K_ == 0.0) return out;
  if (!contains(y)) throw InvalidArgument("SpaceForm::curv_op: invalid base point");
  const double c = h_scale(y);
  double yz = 0.0, xz = 0.0;
  for (int i = 0; i < dim_; ++i) {
    yz += Y[i] * Z[i];
    xz += X[i] * Z[i];
  }
  yz *= c;
  xz *= c;
  for (int i = 0; i < dim_; ++i) out[std::size_t(i)] = K_ * (yz * X[i] - xz * Y[i]);
  return out;
}

std::vector<double> SpaceForm::wrap(std::span<const double> y) const {
  std::vector<double> out(y.begin(), y.end());
  if (chart_ == Chart::FlatTorus) {
    for (int i = 0; i < dim_; ++i) {
      const double p = periods_[std::size_t(i)];
      out[std::size_t(i)] = std::fmod(out[std::size_t(i)], p);
      if (out[std::size_t(i)] < 0.0) out[std::size_t(i)] += p;
    }
    return out;
  }
  if (!(std::sqrt(norm2(y)) < 1.0 - boundary_guard))
    throw FlowDiverged("SpaceForm::wrap: point within guard of the ball boundary");
  return out;
}

} // namespace cflow
