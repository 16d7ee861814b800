#pragma once

#include "cflow/map_field.hpp"
#include "cflow/metric.hpp"

namespace cflow {

/// Covariant derivative of a u*TN-valued one-form:
/// (nabla_i omega)_j^a = d_i omega_j^a - Gamma^k_ij omega_k^a
///                       + Gamma^N a_bc(u) du_i^b omega_j^c.
/// Output rank TwoTensor with index order (i, j, a).
Field pullback_derivative(const MapField& u, const Field& omega, const MetricField& g);
Field pullback_derivative(const MapField& u, const Field& omega, const Field& gamma,
                          const Field& du);

/// Tension field tau(u)^a = -g^{ij} (nabla du)_ij^a: the algebraic g-trace of
/// the computed pullback Hessian (with the paper's minus sign, so flat M and
/// N give tau = -sum_i d_i d_i u).
Field tension(const MapField& u, const MetricField& g);
Field tension_from(const Field& ginv, const Field& hess);

/// Pullback connection on sections: (nabla_i s)^a = d_i s^a
///                                  + Gamma^N a_bc(u) du_i^b s^c.
Field connection_on_section(const MapField& u, const Field& s, const MetricField& g);
Field connection_on_section(const MapField& u, const Field& s, const Field& du);

/// Formal L2-adjoint of the connection (metric-weighted covariant
/// divergence): (adj omega)^a = -(1/sqrt g) d_i (sqrt g g^{ij} omega_j^a)
///                              - g^{ij} Gamma^N a_bc(u) du_i^b omega_j^c.
/// Adjointness against connection_on_section holds discretely to O(h^2); the
/// defect is monitored by tests, not eliminated.
Field adjoint_div(const MapField& u, const Field& omega, const MetricField& g);
Field adjoint_div(const MapField& u, const Field& omega, const MetricField& g, const Field& du);

/// Rough Laplacian: composition adjoint_div(connection_on_section(s)).
Field rough_laplacian(const MapField& u, const Field& s, const MetricField& g);

} // namespace cflow
