#include "cflow/spectral.hpp"

#include <cmath>
#include <fftw3.h>

namespace cflow {

struct BilaplacianSolver::Impl {
  Grid4 grid;
  std::int64_t nodes = 0;
  std::int64_t nfreq = 0; // r2c layout: n0*n1*n2*(n3/2+1)
  double* real = nullptr;
  fftw_complex* freq = nullptr;
  fftw_plan fwd{};
  fftw_plan bwd{};
  std::vector<double> lam; // Laplacian symbol per retained frequency

  explicit Impl(const Grid4& g) : grid(g) {
    nodes = g.node_count();
    const int n0 = g.dims[0], n1 = g.dims[1], n2 = g.dims[2], n3 = g.dims[3];
    nfreq = std::int64_t(n0) * n1 * n2 * (n3 / 2 + 1);
    real = fftw_alloc_real(std::size_t(nodes));
    freq = fftw_alloc_complex(std::size_t(nfreq));
    // FFTW_ESTIMATE keeps planning deterministic run-to-run.
    fwd = fftw_plan_dft_r2c(4, g.dims.data(), real, freq, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r(4, g.dims.data(), freq, real, FFTW_ESTIMATE);

    lam.resize(std::size_t(nfreq));
    std::array<std::vector<double>, 4> axis_sym;
    for (int a = 0; a < 4; ++a) {
      axis_sym[a].resize(std::size_t(g.dims[a]));
      for (int k = 0; k < g.dims[a]; ++k) {
        double s = std::sin(2.0 * M_PI * k / g.dims[a]) / g.spacing[a];
        axis_sym[a][std::size_t(k)] = s * s;
      }
    }
    std::int64_t idx = 0;
    for (int k0 = 0; k0 < n0; ++k0)
      for (int k1 = 0; k1 < n1; ++k1)
        for (int k2 = 0; k2 < n2; ++k2)
          for (int k3 = 0; k3 <= n3 / 2; ++k3)
            lam[std::size_t(idx++)] = axis_sym[0][k0] + axis_sym[1][k1] +
                                      axis_sym[2][k2] + axis_sym[3][k3];
  }

  ~Impl() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(freq);
  }
};

BilaplacianSolver::BilaplacianSolver(const Grid4& grid)
    : impl_(std::make_unique<Impl>(grid)) {}
BilaplacianSolver::~BilaplacianSolver() = default;

double BilaplacianSolver::laplacian_symbol(const Grid4& g, const std::array<int, 4>& k) {
  double lam = 0.0;
  for (int a = 0; a < 4; ++a) {
    double s = std::sin(2.0 * M_PI * k[a] / g.dims[a]) / g.spacing[a];
    lam += s * s;
  }
  return lam;
}

Field BilaplacianSolver::solve(const Field& rhs, double alpha) const {
  if (!(rhs.grid() == impl_->grid))
    throw InvalidArgument("BilaplacianSolver: grid mismatch");
  if (rhs.size() == 0) throw InvalidArgument("BilaplacianSolver: empty field");
  if (!(alpha >= 0.0)) throw InvalidArgument("BilaplacianSolver: alpha must be >= 0");
  if (!rhs.all_finite()) throw InvalidArgument("BilaplacianSolver: non-finite input");

  Field out(rhs.grid(), rhs.rank());
  const int comps = rhs.components();
  const std::int64_t nodes = impl_->nodes;
  const double norm = 1.0 / double(nodes);
  for (int c = 0; c < comps; ++c) {
    for (std::int64_t i = 0; i < nodes; ++i) impl_->real[i] = rhs[i * comps + c];
    fftw_execute(impl_->fwd);
    for (std::int64_t i = 0; i < impl_->nfreq; ++i) {
      const double l = impl_->lam[std::size_t(i)];
      const double m = norm / (1.0 + alpha * l * l);
      impl_->freq[i][0] *= m;
      impl_->freq[i][1] *= m;
    }
    fftw_execute(impl_->bwd);
    for (std::int64_t i = 0; i < nodes; ++i) out[i * comps + c] = impl_->real[i];
  }
  return out;
}

Field spectral_solve_bilaplacian(const Field& rhs, double alpha) {
  BilaplacianSolver solver(rhs.grid());
  return solver.solve(rhs, alpha);
}

} // namespace cflow
