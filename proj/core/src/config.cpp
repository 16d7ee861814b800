#include "cflow/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cflow/expression.hpp"

namespace cflow {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ConfigError("config: " + what); }

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad("'" + where + "' must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) bad("unknown key '" + it.key() + "' in '" + where + "'");
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) bad("missing key '" + key + "' in '" + where + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) bad("'" + where + "." + key + "' must be a number");
  return v.get<double>();
}

std::int64_t get_int(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) bad("missing key '" + key + "' in '" + where + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) bad("'" + where + "." + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) bad("missing key '" + key + "' in '" + where + "'");
  const auto& v = obj.at(key);
  if (!v.is_string()) bad("'" + where + "." + key + "' must be a string");
  return v.get<std::string>();
}

GridConfig parse_grid(const json& j) {
  require_keys(j, "grid", {"dims", "lengths"});
  GridConfig g;
  if (!j.contains("dims")) bad("missing key 'dims' in 'grid'");
  const auto& dims = j.at("dims");
  if (!dims.is_array() || dims.size() != 4) bad("'grid.dims' must be an array of 4 integers");
  for (int i = 0; i < 4; ++i) {
    if (!dims[std::size_t(i)].is_number_integer()) bad("'grid.dims' entries must be integers");
    g.dims[std::size_t(i)] = dims[std::size_t(i)].get<int>();
    if (g.dims[std::size_t(i)] < 8 || g.dims[std::size_t(i)] % 2 != 0)
      bad("'grid.dims[" + std::to_string(i) + "]' must be even and >= 8");
  }
  if (j.contains("lengths")) {
    const auto& len = j.at("lengths");
    if (!len.is_array() || len.size() != 4) bad("'grid.lengths' must be an array of 4 numbers");
    for (int i = 0; i < 4; ++i) {
      if (!len[std::size_t(i)].is_number()) bad("'grid.lengths' entries must be numbers");
      g.lengths[std::size_t(i)] = len[std::size_t(i)].get<double>();
      if (!(g.lengths[std::size_t(i)] > 0.0))
        bad("'grid.lengths[" + std::to_string(i) + "]' must be positive");
    }
  }
  return g;
}

MetricConfig parse_metric(const json& j) {
  require_keys(j, "metric", {"kind", "phi", "base_diag"});
  MetricConfig m;
  const std::string kind = get_string(j, "metric", "kind");
  if (kind == "flat") {
    m.kind = MetricConfig::Kind::Flat;
    if (j.contains("phi")) bad("'metric.phi' is only valid for kind 'conformal'");
  } else if (kind == "conformal") {
    m.kind = MetricConfig::Kind::Conformal;
    m.phi = get_string(j, "metric", "phi");
    try {
      Expression::parse(m.phi);
    } catch (const ConfigError& e) {
      bad("'metric.phi' does not parse: " + std::string(e.what()));
    }
  } else {
    bad("'metric.kind' must be 'flat' or 'conformal'");
  }
  if (j.contains("base_diag")) {
    const auto& bd = j.at("base_diag");
    if (!bd.is_array() || bd.size() != 4) bad("'metric.base_diag' must be an array of 4 numbers");
    for (int i = 0; i < 4; ++i) {
      m.base_diag[std::size_t(i)] = bd[std::size_t(i)].get<double>();
      if (!(m.base_diag[std::size_t(i)] > 0.0)) bad("'metric.base_diag' entries must be positive");
    }
  }
  return m;
}

TargetConfig parse_target(const json& j) {
  require_keys(j, "target", {"kind", "dim", "K", "periods"});
  TargetConfig t;
  const std::string kind = get_string(j, "target", "kind");
  t.dim = int(get_int(j, "target", "dim"));
  if (t.dim < 1) bad("'target.dim' must be >= 1");
  if (kind == "torus") {
    t.kind = TargetConfig::Kind::Torus;
    t.K = j.contains("K") ? get_number(j, "target", "K") : 0.0;
    if (t.K != 0.0) bad("'target.K' must be 0 for torus targets");
    if (!j.contains("periods")) bad("missing key 'periods' in 'target'");
    const auto& p = j.at("periods");
    if (!p.is_array() || int(p.size()) != t.dim)
      bad("'target.periods' must list one period per target dimension");
    for (const auto& v : p) {
      const double period = v.get<double>();
      if (!(period > 0.0)) bad("'target.periods' entries must be positive");
      t.periods.push_back(period);
    }
  } else if (kind == "ball") {
    t.kind = TargetConfig::Kind::Ball;
    t.K = get_number(j, "target", "K");
    if (!(t.K < 0.0)) bad("'target.K' must be negative for ball targets");
    if (j.contains("periods")) bad("'target.periods' is only valid for torus targets");
  } else {
    bad("'target.kind' must be 'torus' or 'ball'");
  }
  return t;
}

std::vector<std::array<int, 4>> parse_linear_part(const json& j, int dim) {
  const auto& lp = j.at("linear_part");
  if (!lp.is_array() || int(lp.size()) != dim)
    bad("'initial_map.linear_part' must have one row of 4 integers per target dimension");
  std::vector<std::array<int, 4>> A;
  for (const auto& row : lp) {
    if (!row.is_array() || row.size() != 4)
      bad("'initial_map.linear_part' rows must have 4 integer entries");
    std::array<int, 4> r{};
    for (int i = 0; i < 4; ++i) {
      if (!row[std::size_t(i)].is_number_integer())
        bad("'initial_map.linear_part' entries must be integers");
      r[std::size_t(i)] = row[std::size_t(i)].get<int>();
    }
    A.push_back(r);
  }
  return A;
}

InitialMapConfig parse_initial_map(const json& j, const TargetConfig& target) {
  require_keys(j, "initial_map", {"kind", "value", "linear_part", "modes"});
  InitialMapConfig m;
  const std::string kind = get_string(j, "initial_map", "kind");
  if (kind == "constant") {
    m.kind = InitialMapConfig::Kind::Constant;
    if (j.contains("value")) {
      const auto& v = j.at("value");
      if (!v.is_array() || int(v.size()) != target.dim)
        bad("'initial_map.value' must have one entry per target dimension");
      for (const auto& x : v) m.value.push_back(x.get<double>());
    } else {
      m.value.assign(std::size_t(target.dim), 0.0);
    }
  } else if (kind == "affine" || kind == "affine_plus_modes") {
    m.kind = (kind == "affine") ? InitialMapConfig::Kind::Affine
                                : InitialMapConfig::Kind::AffinePlusModes;
    if (!j.contains("linear_part")) bad("missing key 'linear_part' in 'initial_map'");
    m.linear_part = parse_linear_part(j, target.dim);
    if (m.kind == InitialMapConfig::Kind::AffinePlusModes) {
      if (!j.contains("modes")) bad("missing key 'modes' in 'initial_map'");
      const auto& modes = j.at("modes");
      if (!modes.is_array()) bad("'initial_map.modes' must be an array");
      for (const auto& mj : modes) {
        require_keys(mj, "initial_map.modes[]", {"axis", "wavevector", "amplitude", "component"});
        ModeConfig mc;
        mc.axis = int(get_int(mj, "initial_map.modes[]", "axis"));
        mc.wavevector = int(get_int(mj, "initial_map.modes[]", "wavevector"));
        mc.amplitude = get_number(mj, "initial_map.modes[]", "amplitude");
        mc.component = int(get_int(mj, "initial_map.modes[]", "component"));
        if (mc.axis < 0 || mc.axis > 3) bad("'initial_map.modes[].axis' must be in 0..3");
        if (mc.component < 0 || mc.component >= target.dim)
          bad("'initial_map.modes[].component' out of range for target dimension");
        if (!std::isfinite(mc.amplitude)) bad("'initial_map.modes[].amplitude' must be finite");
        m.modes.push_back(mc);
      }
    }
    if (target.kind == TargetConfig::Kind::Ball)
      for (const auto& row : m.linear_part)
        for (int v : row)
          if (v != 0) bad("'initial_map.linear_part' must be zero for ball targets");
  } else {
    bad("'initial_map.kind' must be 'constant', 'affine' or 'affine_plus_modes'");
  }
  return m;
}

FlowConfig parse_flow(const json& j, bool& has_flow) {
  require_keys(j, "flow", {"policy", "scheme", "cfl", "dt", "t_max", "grad_tol",
                           "snapshot_every", "monitor_every"});
  FlowConfig f;
  has_flow = true;
  const std::string policy = j.contains("policy") ? get_string(j, "flow", "policy") : "explicit";
  if (policy == "explicit") {
    f.policy = FlowConfig::Policy::Explicit;
    if (j.contains("cfl")) f.cfl = get_number(j, "flow", "cfl");
    if (!(f.cfl > 0.0) || !(f.cfl <= 1.0)) bad("'flow.cfl' must be in (0, 1]");
    if (j.contains("dt")) bad("'flow.dt' is only valid for the imex policy");
  } else if (policy == "imex") {
    f.policy = FlowConfig::Policy::Imex;
    f.dt = get_number(j, "flow", "dt");
    if (!(f.dt > 0.0)) bad("'flow.dt' must be positive");
    if (j.contains("cfl")) bad("'flow.cfl' is only valid for the explicit policy");
    if (j.contains("scheme")) bad("'flow.scheme' is only valid for the explicit policy");
  } else {
    bad("'flow.policy' must be 'explicit' or 'imex'");
  }
  if (j.contains("scheme") && policy == "explicit") {
    const std::string scheme = get_string(j, "flow", "scheme");
    if (scheme == "euler")
      f.scheme = FlowConfig::Scheme::Euler;
    else if (scheme == "rk4")
      f.scheme = FlowConfig::Scheme::Rk4;
    else
      bad("'flow.scheme' must be 'euler' or 'rk4'");
  }
  f.t_max = get_number(j, "flow", "t_max");
  if (!(f.t_max > 0.0)) bad("'flow.t_max' must be positive");
  if (j.contains("grad_tol")) {
    f.grad_tol = get_number(j, "flow", "grad_tol");
    if (!(f.grad_tol > 0.0)) bad("'flow.grad_tol' must be positive");
  }
  if (j.contains("snapshot_every")) {
    f.snapshot_every = get_int(j, "flow", "snapshot_every");
    if (f.snapshot_every < 0) bad("'flow.snapshot_every' must be >= 0");
  }
  if (j.contains("monitor_every")) {
    f.monitor_every = get_int(j, "flow", "monitor_every");
    if (f.monitor_every < 1) bad("'flow.monitor_every' must be >= 1");
  }
  return f;
}

} // namespace

RunConfig parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  require_keys(j, "(top level)",
               {"grid", "metric", "target", "initial_map", "flow", "seed", "output_dir"});
  RunConfig cfg;
  if (!j.contains("grid")) bad("missing key 'grid'");
  cfg.grid = parse_grid(j.at("grid"));
  if (j.contains("metric")) cfg.metric = parse_metric(j.at("metric"));
  if (j.contains("target")) cfg.target = parse_target(j.at("target"));
  if (j.contains("initial_map")) {
    if (!cfg.target) bad("'initial_map' requires 'target'");
    cfg.initial_map = parse_initial_map(j.at("initial_map"), *cfg.target);
  }
  if (j.contains("flow")) cfg.flow = parse_flow(j.at("flow"), cfg.has_flow);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) bad("'seed' must be an integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output_dir")) cfg.output_dir = get_string(j, "(top level)", "output_dir");

  // Torus maps must close up around the periods: A^a_i L_i must be an
  // integer multiple of the target period.
  if (cfg.target && cfg.target->kind == TargetConfig::Kind::Torus && cfg.initial_map &&
      cfg.initial_map->kind != InitialMapConfig::Kind::Constant) {
    for (std::size_t a = 0; a < cfg.initial_map->linear_part.size(); ++a)
      for (int i = 0; i < 4; ++i) {
        const double w = cfg.initial_map->linear_part[a][std::size_t(i)] *
                         cfg.grid.lengths[std::size_t(i)] / cfg.target->periods[a];
        if (std::abs(w - std::round(w)) > 1e-9)
          bad("'initial_map.linear_part[" + std::to_string(a) + "][" + std::to_string(i) +
              "]' is incompatible with the grid lengths and target periods");
      }
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

} // namespace cflow
