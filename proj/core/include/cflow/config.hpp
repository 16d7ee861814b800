#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cflow/errors.hpp"
#include "cflow/flow.hpp"

namespace cflow {

struct GridConfig {
  std::array<int, 4> dims{};
  std::array<double, 4> lengths{1.0, 1.0, 1.0, 1.0};
};

struct MetricConfig {
  enum class Kind { Flat, Conformal };
  Kind kind = Kind::Flat;
  std::string phi;                                  // conformal factor expression
  std::array<double, 4> base_diag{1.0, 1.0, 1.0, 1.0}; // optional constant base
};

struct TargetConfig {
  enum class Kind { Torus, Ball };
  Kind kind = Kind::Torus;
  int dim = 1;
  double K = 0.0;
  std::vector<double> periods;
};

struct ModeConfig {
  int axis = 0;
  int wavevector = 1;
  double amplitude = 0.0;
  int component = 0;
};

struct InitialMapConfig {
  enum class Kind { Constant, Affine, AffinePlusModes };
  Kind kind = Kind::Constant;
  std::vector<double> value;                 // constant
  std::vector<std::array<int, 4>> linear_part; // affine / affine_plus_modes
  std::vector<ModeConfig> modes;
};

/// Full batch-run description; json-backed, unknown keys rejected.
struct RunConfig {
  GridConfig grid;
  MetricConfig metric;
  std::optional<TargetConfig> target;
  std::optional<InitialMapConfig> initial_map;
  FlowConfig flow;
  bool has_flow = false;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& json_text);

} // namespace cflow
