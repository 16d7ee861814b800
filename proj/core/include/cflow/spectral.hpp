#pragma once

#include <memory>
#include <vector>

#include "cflow/grid.hpp"

namespace cflow {

/// Solves (Id + alpha * Lap0^2) w = rhs component-wise on the flat background,
/// where Lap0 is the composed-central-difference Laplacian. Its discrete
/// symbol is lambda_k = sum_i sin^2(2 pi k_i / n_i) / h_i^2, matching the
/// stencil operator exactly, so the solve is spectrally exact.
class BilaplacianSolver {
public:
  explicit BilaplacianSolver(const Grid4& grid);
  ~BilaplacianSolver();
  BilaplacianSolver(const BilaplacianSolver&) = delete;
  BilaplacianSolver& operator=(const BilaplacianSolver&) = delete;

  Field solve(const Field& rhs, double alpha) const;

  /// Discrete symbol of the flat Laplacian at one frequency multi-index.
  static double laplacian_symbol(const Grid4& g, const std::array<int, 4>& k);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around BilaplacianSolver.
Field spectral_solve_bilaplacian(const Field& rhs, double alpha);

} // namespace cflow
