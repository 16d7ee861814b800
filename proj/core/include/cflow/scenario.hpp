#pragma once

#include "cflow/config.hpp"
#include "cflow/energy.hpp"
#include "cflow/map_field.hpp"

namespace cflow {

/// Builds the concrete run objects from a validated config.
Grid4 build_grid(const RunConfig& cfg);
MetricField build_metric(const RunConfig& cfg, const Grid4& grid);
SpaceForm build_target(const TargetConfig& cfg);
MapField build_initial_map(const RunConfig& cfg, const Grid4& grid, const SpaceForm& target);

/// Band-limited random map for randomized checks: per component a few modes
/// with wavevectors up to kmax and amplitudes up to amp, deterministic in the
/// seed. Ball targets are kept inside the chart by construction.
MapField random_map(const Grid4& grid, const SpaceForm& target, std::uint64_t seed, int kmax,
                    double amp, LinearPart linear_part = {});
/// Same construction for a perturbation section.
Field random_section(const Grid4& grid, int dim, std::uint64_t seed, int kmax, double amp);

/// Scalar field from a coordinate expression.
Field eval_expression(const Grid4& grid, const std::string& expr_text);

} // namespace cflow
