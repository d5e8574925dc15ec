// fokker-flux: command-line driver for runs, presets, gamma sweeps and eigenvalue queries.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "fokker_flux/experiments.hpp"
#include "fokker_flux/spectral.hpp"

namespace ff = fokker_flux;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitIo = 4;

int exit_code_for(ff::ErrorCode code) {
  switch (code) {
    case ff::ErrorCode::config:
    case ff::ErrorCode::invalid_grid:
    case ff::ErrorCode::invalid_initial:
    case ff::ErrorCode::invalid_model:
    case ff::ErrorCode::shape:
    case ff::ErrorCode::domain:
    case ff::ErrorCode::index:
    case ff::ErrorCode::precondition:
      return kExitConfig;
    case ff::ErrorCode::io:
      return kExitIo;
    default:
      return kExitRuntime;
  }
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ff::Error(ff::ErrorCode::config, fmt::format("cannot parse '{}' in {}", item, what));
    }
  }
  if (out.empty()) throw ff::Error(ff::ErrorCode::config, fmt::format("{} is empty", what));
  return out;
}

void report(const ff::RunResult& r) {
  const ff::RunSummary& s = r.summary;
  fmt::print("model {}  n={}  dt={:g}  steps={}  t={:g}\n", ff::to_string(s.config.model), s.config.n, s.dt_used,
             s.steps, s.final_time);
  fmt::print("  final sup|rho - rho_inf| = {:.6e}\n", s.final_sup_distance);
  fmt::print("  final mass = {:.6f} (nodal mean {:.6f}), stationary mass = {:.6f}\n", s.final_mass,
             s.final_mass_nodal_mean, s.stationary_mass_closed);
  if (s.fit) {
    fmt::print("  fitted rate = {:.6f} on [{:g}, {:g}], r^2 = {:.6f}\n", s.fit->fitted_slope, s.fit->window.lo,
               s.fit->window.hi, s.fit->r_squared);
  } else {
    fmt::print("  fitted rate unavailable: {}\n", s.fit_error);
  }
  fmt::print("  predicted rate = {:.6f} ({})\n", s.predicted.value, ff::to_string(s.predicted.source));
  fmt::print("  wall clock {:.2f} s, artifacts in {}\n", s.wall_clock_seconds, s.config.outputs);
}

void print_eigen(const ff::EigenResult& e) {
  fmt::print("{:<11} k = {:.10f}  lambda = {:.10f}  rate = {:.10f}  |g(k)| = {:.2e}\n", ff::to_string(e.equation),
             e.k, e.lambda, e.rate, e.root_residual);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference Fokker-Planck solver with in- and outflow of mass"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run a simulation described by a JSON configuration");
  run_cmd->add_option("--config", config_path, "Configuration file")->required();

  std::string preset_name;
  std::string out_dir;
  bool coarse = false;
  bool list = false;
  auto* preset_cmd = app.add_subcommand("preset", "Run a named preset");
  preset_cmd->add_option("name", preset_name, "Preset name");
  preset_cmd->add_option("--out", out_dir, "Output directory");
  preset_cmd->add_flag("--coarse", coarse, "Use n = 100, dt = 2e-5");
  preset_cmd->add_flag("--list", list, "List preset names");

  std::string sweep_config;
  std::string gamma_list;
  std::string sweep_csv;
  auto* sweep_cmd = app.add_subcommand("sweep", "Fitted decay slope of model A for several gamma");
  sweep_cmd->add_option("--config", sweep_config, "Base configuration (model A)")->required();
  sweep_cmd->add_option("--gamma", gamma_list, "Comma-separated gamma values")->required();
  sweep_cmd->add_option("--csv", sweep_csv, "Output table (default <outputs>/sweep.csv)");

  double beta = 1.0;
  std::string weights;
  auto* eigen_cmd = app.add_subcommand("eigen", "Smallest Robin eigenvalues behind the model A rate");
  eigen_cmd->add_option("--beta", beta, "Outflux rate for k tan k = beta")->required();
  eigen_cmd->add_option("--weights", weights, "Boundary weights w0,w1 (default 0.5,0.5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      report(ff::run(ff::load_config(config_path)));
    } else if (*preset_cmd) {
      if (list) {
        for (const auto& name : ff::preset_names()) fmt::print("{}\n", name);
        return 0;
      }
      if (preset_name.empty()) throw ff::Error(ff::ErrorCode::config, "preset name required (see --list)");
      ff::RunConfig cfg = ff::preset(preset_name);
      if (coarse) cfg = ff::coarsen(cfg);
      if (!out_dir.empty()) cfg.outputs = out_dir;
      if (preset_name == "gamma-sweep") {
        const auto rows = ff::gamma_sweep(cfg, {0.0, 0.25, 0.5, 0.75, 1.0}, cfg.outputs + "/sweep.csv",
                                          ff::sweep_threads());
        for (const auto& row : rows) fmt::print("gamma = {:<6g} slope = {:.6f}\n", row.gamma, row.fit.fitted_slope);
      } else {
        report(ff::run(cfg));
      }
    } else if (*sweep_cmd) {
      const ff::RunConfig base = ff::load_config(sweep_config);
      const std::vector<double> gammas = parse_list(gamma_list, "--gamma");
      const std::string csv = sweep_csv.empty() ? base.outputs + "/sweep.csv" : sweep_csv;
      const auto rows = ff::gamma_sweep(base, gammas, csv, ff::sweep_threads());
      for (const auto& row : rows) fmt::print("gamma = {:<6g} slope = {:.6f}\n", row.gamma, row.fit.fitted_slope);
      fmt::print("table written to {}\n", csv);
    } else if (*eigen_cmd) {
      double w0 = 0.5, w1 = 0.5;
      if (!weights.empty()) {
        const std::vector<double> w = parse_list(weights, "--weights");
        if (w.size() != 2) throw ff::Error(ff::ErrorCode::config, "--weights expects w0,w1");
        w0 = w[0];
        w1 = w[1];
      }
      print_eigen(ff::friedrichs_k(w0, w1));
      print_eigen(ff::symmetric_k(beta));
    }
  } catch (const ff::Error& e) {
    std::fprintf(stderr, "fokker-flux: %s error: %s\n", ff::to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fokker-flux: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
