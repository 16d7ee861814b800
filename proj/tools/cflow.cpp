// Batch driver: invariants | energy | flow | check, all configured by a JSON
// file (see README for the schema). Exit codes: 0 success/Converged, 2 config
// error, 3 check failure, 4 flow Diverged, 5 TimeUp.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cflow/checks.hpp"
#include "cflow/curvature.hpp"
#include "cflow/field_io.hpp"
#include "cflow/flow.hpp"
#include "cflow/parallel.hpp"
#include "cflow/scenario.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitTimeUp = 5;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_invariants(const cflow::RunConfig& cfg) {
  const cflow::Grid4 grid = cflow::build_grid(cfg);
  const cflow::MetricField g = cflow::build_metric(cfg, grid);
  const cflow::RicciData rc = cflow::ricci_curvature(g);
  double smin = rc.scal.at(0, 0), smax = smin;
  for (std::int64_t node = 0; node < grid.node_count(); ++node) {
    smin = std::min(smin, rc.scal.at(node, 0));
    smax = std::max(smax, rc.scal.at(node, 0));
  }
  json outj = {
      {"kappa", cflow::q_total(g, rc)},
      {"yamabe_quotient", cflow::yamabe_quotient(g, rc)},
      {"scal_min", smin},
      {"scal_max", smax},
  };
  std::cout << outj.dump(2) << "\n";
  return kExitOk;
}

int cmd_energy(const cflow::RunConfig& cfg) {
  const cflow::Grid4 grid = cflow::build_grid(cfg);
  const cflow::MetricField g = cflow::build_metric(cfg, grid);
  if (!cfg.target || !cfg.initial_map)
    throw cflow::ConfigError("config: 'energy' requires 'target' and 'initial_map'");
  const cflow::SpaceForm target = cflow::build_target(*cfg.target);
  const cflow::MapField u = cflow::build_initial_map(cfg, grid, target);
  const cflow::EnergyReport r = cflow::energy_report(u, g);
  json outj = {
      {"conformal", r.conformal}, {"biharmonic", r.biharmonic}, {"dirichlet", r.dirichlet},
      {"quartic", r.quartic},     {"total", r.total},           {"hessian", r.hessian},
  };
  std::cout << outj.dump(2) << "\n";
  return kExitOk;
}

int cmd_flow(const cflow::RunConfig& cfg) {
  const cflow::Grid4 grid = cflow::build_grid(cfg);
  const cflow::MetricField g = cflow::build_metric(cfg, grid);
  if (!cfg.target || !cfg.initial_map)
    throw cflow::ConfigError("config: 'flow' requires 'target' and 'initial_map'");
  if (!cfg.has_flow) throw cflow::ConfigError("config: 'flow' requires a 'flow' section");
  const cflow::SpaceForm target = cflow::build_target(*cfg.target);
  const cflow::MapField u0 = cflow::build_initial_map(cfg, grid, target);

  std::filesystem::create_directories(cfg.output_dir);
  auto snapshot = [&](const cflow::FlowState& st) {
    cflow::write_map(cfg.output_dir + "/snapshot_" + std::to_string(st.step) + ".cfl", st.u);
  };
  cflow::FlowResult res = cflow::run_flow(u0, g, cfg.flow, snapshot);

  {
    std::ofstream csv(cfg.output_dir + "/diagnostics.csv", std::ios::trunc);
    csv << "t,energy,dissipation_integral,dirichlet,hessian,quartic,grad_norm,"
           "identity_residual\n";
    for (const auto& r : res.state.history)
      csv << fmt(r.t) << ',' << fmt(r.energy) << ',' << fmt(r.dissipation_integral) << ','
          << fmt(r.dirichlet) << ',' << fmt(r.hessian) << ',' << fmt(r.quartic) << ','
          << fmt(r.grad_norm) << ',' << fmt(r.identity_residual) << '\n';
  }
  cflow::write_map(cfg.output_dir + "/final_map.cfl", res.state.u);

  const auto& last = res.state.history.back();
  json summary = {
      {"exit_reason", cflow::to_string(res.reason)},
      {"t_final", res.state.t},
      {"energy_final", last.energy},
      {"grad_norm_final", last.grad_norm},
  };
  {
    std::ofstream sj(cfg.output_dir + "/summary.json", std::ios::trunc);
    sj << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";
  switch (res.reason) {
    case cflow::ExitReason::Converged: return kExitOk;
    case cflow::ExitReason::Diverged: return kExitDiverged;
    case cflow::ExitReason::TimeUp: return kExitTimeUp;
  }
  return kExitOk;
}

int cmd_check(const cflow::RunConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto results = cflow::run_check_suite(cfg);
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  bool all_pass = true;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    std::printf("%-5s %-*s measured %.3e  threshold %.3e%s%s\n", r.pass ? "PASS" : "FAIL",
                int(width), r.name.c_str(), r.measured, r.threshold,
                r.detail.empty() ? "" : "  ", r.detail.c_str());
  }
  std::printf("%zu checks, %s\n", results.size(), all_pass ? "all passed" : "FAILURES present");
  return all_pass ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"conformal-harmonic map flow toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  int threads = 0;

  for (const char* name : {"invariants", "energy", "flow", "check"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--output-dir", output_dir, "overrides config output_dir");
    sub->add_option("--threads", threads, "worker threads (default: CFLOW_THREADS or 1)");
  }

  CLI11_PARSE(app, argc, argv);

  if (threads <= 0) {
    if (const char* env = std::getenv("CFLOW_THREADS")) threads = std::atoi(env);
  }
  cflow::set_threads(threads > 0 ? threads : 1);

  try {
    cflow::RunConfig cfg = cflow::parse_config(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "invariants") return cmd_invariants(cfg);
    if (sub == "energy") return cmd_energy(cfg);
    if (sub == "flow") return cmd_flow(cfg);
    return cmd_check(cfg);
  } catch (const cflow::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cflow::FlowDiverged& e) {
    std::cerr << "error: flow diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
