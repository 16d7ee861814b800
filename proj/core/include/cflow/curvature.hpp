#pragma once

#include "cflow/metric.hpp"

namespace cflow {

/// Christoffel symbols of g: Gamma^k_(ij), packed k * 10 + sym_index(i, j).
/// Built from central first differences of the metric components.
Field christoffels(const MetricField& g);

/// Light curvature path: Christoffels, symmetrized Ricci (Sym2) and scalar
/// curvature without materializing the full Riemann tensor. Memory stays
/// O(40 doubles / node), so this is the path for 24^4-scale grids.
struct RicciData {
  Field gamma; // Christoffel
  Field ric;   // Sym2 (symmetrized)
  Field scal;  // Scalar
};
RicciData ricci_curvature(const MetricField& g);

/// Full bundle including Riemann R^k_lij (256 components per node) and the
/// raw (unsymmetrized) Ricci contraction. Sign convention: the round-sphere
/// conformal patch g = (2/(1+|x|^2))^2 delta yields S = +12, i.e. the usual
/// R^k_lij = d_i Gamma^k_jl - d_j Gamma^k_il + Gamma Gamma ordering with
/// Ric_lj = R^i_lij.
struct CurvatureBundle {
  Field gamma;   // Christoffel
  Field riem;    // Riemann, index ((k*4 + l)*4 + i)*4 + j
  Field ric_raw; // 4x4 unsymmetrized Ricci, index l*4 + j
  Field ric;     // Sym2 symmetrized
  Field scal;    // Scalar
};
CurvatureBundle curvature(const MetricField& g);

/// Total Q-curvature kappa = (1/12) Int (S^2 - 3 |Ric|^2) dv, with |Ric|^2 =
/// g^{ik} g^{jl} Ric_ij Ric_kl. A conformal invariant of [g] in dimension 4.
double q_total(const MetricField& g);
double q_total(const MetricField& g, const RicciData& rc);

/// Normalized total scalar curvature of THIS metric: Int S dv / (Int dv)^{1/2}.
/// An upper bound for the Yamabe number mu(M,[g]); no minimization is done.
double yamabe_quotient(const MetricField& g);
double yamabe_quotient(const MetricField& g, const RicciData& rc);

} // namespace cflow
