#pragma once

#include "cflow/curvature.hpp"
#include "cflow/map_field.hpp"
#include "cflow/metric.hpp"

namespace cflow {

/// Static geometry of a fixed metric, precomputed once and shared by all
/// energy and flow evaluations: curvature, the Christoffel contraction
/// c^k = g^{ij} Gamma^k_ij, and the curvature endomorphism
/// B^{ij} = (2/3) S g^{ij} - 2 Ric^{ij} entering both the energy density and
/// its gradient.
struct MetricWorkspace {
  MetricField metric;
  RicciData rc;
  Field cvec; // Vector, c^k
  Field bup;  // Sym2, B^{ij}
  double lambda_g = 1.0; // max over nodes of (max eig g^{-1})^2
  bool flat = false;

  static MetricWorkspace make(MetricField g);
  const Grid4& grid() const { return metric.grid(); }
};

/// Scalar summary of one map: the conformal energy, the biharmonic energy,
/// the Dirichlet and quartic gradient norms, the total energy
/// E = conformal + sqrt(quartic), and the full Hessian norm.
struct EnergyReport {
  double conformal = 0.0;  // Int (|tau|^2 + 2/3 S |du|^2 - 2 Ric(du,du)) dv
  double biharmonic = 0.0; // Int |tau|^2 dv
  double dirichlet = 0.0;  // Int |du|^2 dv
  double quartic = 0.0;    // Int |du|^4 dv
  double total = 0.0;      // conformal + sqrt(quartic)
  double hessian = 0.0;    // Int |nabla du|^2 dv
};

EnergyReport energy_report(const MapField& u, const MetricWorkspace& ws);
EnergyReport energy_report(const MapField& u, const MetricField& g);

double conformal_energy(const MapField& u, const MetricField& g);
double biharmonic_energy(const MapField& u, const MetricField& g);
double total_energy(const MapField& u, const MetricField& g);

/// Local energy with a smooth cutoff: eta = 1 on the periodic-distance ball
/// B_R(center), 0 outside B_2R, quartic bump (1-s^2)^2 in between. Requires
/// 2R smaller than half the shortest period.
double local_energy(const MapField& u, const MetricWorkspace& ws, std::int64_t center,
                    double R);
double local_energy(const MapField& u, const MetricField& g, std::int64_t center, double R);
/// The cutoff profile itself (for partition / derivative-bound tests).
Field cutoff_field(const Grid4& grid, std::int64_t center, double R);

/// The fourth-order operator L(u): Delta-bar tau + R^N(du, tau) du +
/// adjoint-div((2/3 S - 2 Ric) du), discretized as the exact lattice gradient
/// of the discrete conformal energy: dE(v) = 2 <L(u), v> holds to round-off
/// against the quadrature and stencils used by energy_report. The formal
/// term-by-term assembly from the pullback operators agrees with this one to
/// O(h^2) (see tests); the gradient form is what the flow integrates.
Field c_harmonic_operator(const MapField& u, const MetricWorkspace& ws);
Field c_harmonic_operator(const MapField& u, const MetricField& g);

/// Gradient of the biharmonic energy F(u) alone (the flat-curvature part of
/// L; with K = 0 and flat g both operators coincide with the bi-Laplacian).
Field biharmonic_operator(const MapField& u, const MetricWorkspace& ws);

/// Central-quotient check of dE(v) = 2 <L(u), v>: returns
/// |quot(eps) - 2<L,v>| / (|2<L,v>| + 1e-30). Perturbations act on chart
/// coordinates; throws if u +/- eps v leaves the ball chart.
double gradient_check(const MapField& u, const MetricWorkspace& ws, const Field& v,
                      double eps);
double gradient_check(const MapField& u, const MetricField& g, const Field& v, double eps);

/// Relative defect of the Bochner-Weitzenboeck identity
/// ||tau||^2 = ||nabla du||^2 - Int(sum <R^N(du_i,du_j)du_j,du_i> - Ric(du,du)).
double bochner_residual(const MapField& u, const MetricWorkspace& ws);
double bochner_residual(const MapField& u, const MetricField& g);

/// Diagnostic sample of the coercivity constant: E(u) / ||du||_2^2.
double coercivity_ratio(const MapField& u, const MetricWorkspace& ws);
double coercivity_ratio(const MapField& u, const MetricField& g);

/// Node-wise bound constant for |E - F| <= c ||du||_2^2:
/// c = 2 max_nodes(|2S/3| + 2 |Ric|_op), |Ric|_op the g-operator norm.
double comparison_constant(const MetricWorkspace& ws);

/// Pointwise |nabla du|^2 - 1/4 |tau|^2 (norms with g on M-indices, h on
/// N-indices). Nonnegative up to round-off: tau is the algebraic g-trace of
/// the same discrete Hessian, so the gap is the trace-free part's norm.
Field trace_free_gap(const MapField& u, const MetricWorkspace& ws);

/// L2 pairings over (dv_g, h(u)): Int <s, w>_h dv for sections and
/// Int g^{ij} <omega_i, sigma_j>_h dv for pullback one-forms.
double section_l2_pair(const MapField& u, const MetricWorkspace& ws, const Field& s,
                       const Field& w);
double oneform_l2_pair(const MapField& u, const MetricWorkspace& ws, const Field& omega,
                       const Field& sigma);

} // namespace cflow
