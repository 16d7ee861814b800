#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cflow/checks.hpp"
#include "cflow/expression.hpp"
#include "cflow/field_io.hpp"
#include "cflow/flow.hpp"
#include "cflow/scenario.hpp"

using namespace cflow;

namespace {

const char* kMinimalConfig = R"cfg({
  "grid": {"dims": [8, 8, 8, 8]},
  "target": {"kind": "torus", "dim": 2, "periods": [1.0, 1.0]},
  "initial_map": {"kind": "affine", "linear_part": [[1,0,0,0],[0,1,0,0]]}
})cfg";

std::string fmt_record(const DiagnosticsRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t,
                r.energy, r.dissipation_integral, r.dirichlet, r.hessian, r.quartic,
                r.grad_norm, r.identity_residual);
  return buf;
}

} // namespace

TEST_CASE("expression parser") {
  Expression e = Expression::parse("0.15*sin(2*pi*x0)*sin(2*pi*x1)");
  CHECK(e.depth() == 4);
  CHECK(e.eval({0.25, 0.25, 0, 0}) == doctest::Approx(0.15));
  CHECK(e.eval({0.0, 0.25, 0, 0}) == doctest::Approx(0.0));

  CHECK(Expression::parse("2^3 + 1").eval({0, 0, 0, 0}) == doctest::Approx(9.0));
  CHECK(Expression::parse("exp(x2) - x3/2").eval({0, 0, 1.0, 4.0}) ==
        doctest::Approx(std::exp(1.0) - 2.0));
  CHECK(Expression::parse("-x0^2").eval({2, 0, 0, 0}) == doctest::Approx(-4.0));

  CHECK_THROWS_AS(Expression::parse("sin(x0"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("tan(x0)"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("x5"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("1 + "), ConfigError);
}

TEST_CASE("minimal config fills the documented defaults") {
  RunConfig cfg = parse_config_text(kMinimalConfig);
  CHECK(cfg.grid.dims[0] == 8);
  CHECK(cfg.grid.lengths[0] == 1.0);
  CHECK(cfg.metric.kind == MetricConfig::Kind::Flat);
  CHECK(cfg.flow.cfl == 0.4);
  CHECK(cfg.flow.grad_tol == 1e-6);
  CHECK(cfg.seed == 0);
  CHECK(cfg.output_dir == ".");
  REQUIRE(cfg.target.has_value());
  CHECK(cfg.target->dim == 2);
}

TEST_CASE("mixed even dims are accepted") {
  RunConfig cfg = parse_config_text(R"cfg({
    "grid": {"dims": [12, 16, 16, 16]},
    "flow": {"policy": "imex", "dt": 1e-5, "t_max": 1.0}
  })cfg");
  CHECK(cfg.grid.dims[0] == 12);
  CHECK(cfg.has_flow);
  CHECK(cfg.flow.policy == FlowConfig::Policy::Imex);
}

TEST_CASE("malformed configs are rejected with the offending key named") {
  struct Case {
    const char* json;
    const char* needle;
  };
  const std::vector<Case> corpus = {
      {"not json at all", "not valid JSON"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "bogus": 1})cfg", "bogus"},
      {R"cfg({})cfg", "grid"},
      {R"cfg({"grid": {"dims": [8,8,8]}})cfg", "dims"},
      {R"cfg({"grid": {"dims": [8,8,8,"x"]}})cfg", "dims"},
      {R"cfg({"grid": {"dims": [7,8,8,8]}})cfg", "dims[0]"},
      {R"cfg({"grid": {"dims": [8,8,8,8], "lengths": [1,1,1,-2]}})cfg", "lengths[3]"},
      {R"cfg({"grid": {"dims": [8,8,8,8], "extra": 1}})cfg", "extra"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "metric": {"kind": "weird"}})cfg", "metric.kind"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "metric": {"kind": "conformal"}})cfg", "phi"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "metric": {"kind": "conformal", "phi": "sin(q0)"}})cfg",
       "metric.phi"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "metric": {"kind": "flat", "phi": "x0"}})cfg", "phi"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "target": {"kind": "cylinder", "dim": 2}})cfg",
       "target.kind"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "target": {"kind": "torus", "dim": 2, "periods": [1]}})cfg",
       "periods"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "target": {"kind": "ball", "dim": 2, "K": 1.0}})cfg",
       "target.K"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "target": {"kind": "ball", "dim": 2, "K": -1.0,
           "periods": [1,1]}})cfg",
       "periods"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "target": {"kind": "torus", "dim": 2,
           "periods": [1,1]}, "initial_map": {"kind": "affine"}})cfg",
       "linear_part"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "target": {"kind": "torus", "dim": 2,
           "periods": [1,1]}, "initial_map": {"kind": "affine",
           "linear_part": [[1,0,0,0]]}})cfg",
       "linear_part"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "target": {"kind": "torus", "dim": 2,
           "periods": [1,1]}, "initial_map": {"kind": "affine_plus_modes",
           "linear_part": [[1,0,0,0],[0,1,0,0]],
           "modes": [{"axis": 5, "wavevector": 1, "amplitude": 0.1, "component": 0}]}})cfg",
       "axis"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "target": {"kind": "torus", "dim": 2,
           "periods": [1,1]}, "initial_map": {"kind": "affine_plus_modes",
           "linear_part": [[1,0,0,0],[0,1,0,0]],
           "modes": [{"axis": 0, "wavevector": 1, "amplitude": 0.1, "component": 7}]}})cfg",
       "component"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "flow": {"policy": "leapfrog", "t_max": 1}})cfg",
       "flow.policy"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "flow": {"policy": "explicit", "cfl": 1.5,
           "t_max": 1}})cfg",
       "cfl"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "flow": {"policy": "explicit", "t_max": -3}})cfg",
       "t_max"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "flow": {"policy": "imex", "t_max": 1}})cfg", "dt"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "flow": {"policy": "explicit", "scheme": "ab2",
           "t_max": 1}})cfg",
       "scheme"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "seed": "abc"})cfg", "seed"},
      {R"cfg({"grid": {"dims": [8,8,8,8]}, "target": {"kind": "torus", "dim": 2,
           "periods": [0.7, 1]}, "initial_map": {"kind": "affine",
           "linear_part": [[1,0,0,0],[0,1,0,0]]}})cfg",
       "linear_part"},
  };
  for (const auto& c : corpus) {
    CAPTURE(c.json);
    try {
      parse_config_text(c.json);
      FAIL_CHECK("config accepted but should have been rejected: " << c.json);
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      CAPTURE(what);
      CHECK(what.find(c.needle) != std::string::npos);
    }
  }
}

TEST_CASE("scenario construction") {
  RunConfig cfg = parse_config_text(R"cfg({
    "grid": {"dims": [8, 8, 8, 8]},
    "metric": {"kind": "conformal", "phi": "0.1*sin(2*pi*x0)"},
    "target": {"kind": "torus", "dim": 2, "periods": [1.0, 1.0]},
    "initial_map": {"kind": "affine_plus_modes",
                    "linear_part": [[1,0,0,0],[0,1,0,0]],
                    "modes": [{"axis": 0, "wavevector": 2, "amplitude": 0.05, "component": 1}]}
  })cfg");
  Grid4 grid = build_grid(cfg);
  MetricField metric = build_metric(cfg, grid);
  CHECK_FALSE(metric.is_flat());
  SpaceForm target = build_target(*cfg.target);
  MapField u = build_initial_map(cfg, grid, target);
  CHECK(u.linear_part()[0][0] == 1);
  // the mode shows up in component 1 only
  double mx0 = 0.0, mx1 = 0.0;
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    mx0 = std::max(mx0, std::abs(u.disp().at(i, 0)));
    mx1 = std::max(mx1, std::abs(u.disp().at(i, 1)));
  }
  CHECK(mx0 == 0.0);
  CHECK(mx1 == doctest::Approx(0.05));

  // constant ball map
  RunConfig cfg2 = parse_config_text(R"cfg({
    "grid": {"dims": [8, 8, 8, 8]},
    "target": {"kind": "ball", "dim": 2, "K": -1.0},
    "initial_map": {"kind": "constant", "value": [0.2, -0.1]}
  })cfg");
  SpaceForm ball = build_target(*cfg2.target);
  MapField ub = build_initial_map(cfg2, build_grid(cfg2), ball);
  CHECK(ub.disp().at(5, 0) == 0.2);
}

TEST_CASE("field container round trip is bit-exact") {
  Grid4 g({8, 8, 8, 8}, {1.0, 2.0, 1.0, 0.5});
  Field f = random_section(g, 3, 99, 2, 1.0);
  f.at(17, 1) = -0.0; // signed zero survives
  f.at(3, 2) = 1e-308;
  const std::string path = "roundtrip_test.cfl";
  write_field(path, f);
  Field r = read_field(path);
  REQUIRE(r.size() == f.size());
  CHECK(r.grid() == g);
  CHECK(r.rank() == f.rank());
  bool identical = true;
  for (std::int64_t i = 0; i < f.size(); ++i)
    identical = identical && std::memcmp(&r[i], &f[i], 8) == 0;
  CHECK(identical);
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_field("does_not_exist.cfl"), IoError);
}

TEST_CASE("map serialization carries the linear part and target") {
  Grid4 g({8, 8, 8, 8}, {1, 1, 1, 1});
  SpaceForm t = SpaceForm::flat_torus(2, {1.0, 2.0});
  MapField u = random_map(g, t, 5, 2, 0.2, LinearPart{{1, 0, -2, 0}, {0, 3, 0, 1}});
  const std::string path = "map_test.cfl";
  write_map(path, u);
  MapField r = read_map(path);
  CHECK(r.linear_part() == u.linear_part());
  CHECK(r.target().periods() == u.target().periods());
  bool identical = true;
  for (std::int64_t i = 0; i < u.disp().size(); ++i)
    identical = identical && r.disp()[i] == u.disp()[i];
  CHECK(identical);
  std::remove(path.c_str());
  std::remove((path + ".meta.json").c_str());
}

TEST_CASE("flow runs are deterministic: identical history bytes") {
  RunConfig cfg = parse_config_text(R"cfg({
    "grid": {"dims": [8, 8, 8, 8]},
    "target": {"kind": "torus", "dim": 2, "periods": [1.0, 1.0]},
    "initial_map": {"kind": "affine_plus_modes",
                    "linear_part": [[1,0,0,0],[0,1,0,0]],
                    "modes": [{"axis": 0, "wavevector": 2, "amplitude": 0.05, "component": 1}]},
    "flow": {"policy": "explicit", "scheme": "rk4", "t_max": 0.001, "grad_tol": 1e-8,
             "monitor_every": 5}
  })cfg");
  Grid4 grid = build_grid(cfg);
  MetricField metric = build_metric(cfg, grid);
  SpaceForm target = build_target(*cfg.target);
  auto run_once = [&] {
    MapField u0 = build_initial_map(cfg, grid, target);
    FlowResult res = run_flow(u0, metric, cfg.flow);
    std::string bytes;
    for (const auto& r : res.state.history) bytes += fmt_record(r) + "\n";
    return bytes;
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("check suite passes on a flat config") {
  RunConfig cfg = parse_config_text(R"cfg({
    "grid": {"dims": [8, 8, 8, 8]},
    "target": {"kind": "torus", "dim": 2, "periods": [1.0, 1.0]},
    "initial_map": {"kind": "affine_plus_modes",
                    "linear_part": [[1,0,0,0],[0,1,0,0]],
                    "modes": [{"axis": 0, "wavevector": 2, "amplitude": 0.05, "component": 1}]},
    "seed": 31
  })cfg");
  auto results = run_check_suite(cfg);
  CHECK(results.size() >= 20);
  for (const auto& r : results) {
    CAPTURE(r.name);
    CAPTURE(r.measured);
    CHECK(r.pass);
  }
}
