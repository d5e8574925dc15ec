#pragma once

// Run configuration, presets reproducing the reference experiments, and the
// drivers behind the fokker-flux command line.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "fokker_flux/domain.hpp"
#include "fokker_flux/entropy.hpp"
#include "fokker_flux/spectral.hpp"
#include "fokker_flux/stationary.hpp"
#include "fokker_flux/transient.hpp"

namespace fokker_flux {

inline const std::vector<std::string> kEmitKinds = {"snapshots", "entropy", "mass", "summary", "svg"};

struct RunConfig {
  ModelKind model = ModelKind::A;
  double alpha = 1.0;
  double beta = 0.9;
  double gamma = 1.0;
  PotentialKind potential = PotentialKind::linear;
  std::vector<double> potential_table;
  InitialSpec initial;
  int n = 200;
  std::optional<double> dt = 5e-6;  // nullopt means "auto" = 0.5 cfl_max_dt
  double t_end = 1.0;
  std::vector<double> snapshot_times;
  int observe_every = 1000;
  Scheme scheme = Scheme::explicit_euler;
  NewtonConfig newton;
  std::optional<FitWindow> fit_window;
  bool monitor_every_step = false;
  std::string outputs = "out";
  std::vector<std::string> emit = {"snapshots", "entropy", "summary"};

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Parses a JSON run configuration. Unknown keys and malformed values raise ErrorCode::config.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

/// Throws config (or invalid_model / invalid_grid) errors for inconsistent settings,
/// including an explicit dt above the stability bound.
void validate_config(const RunConfig& config);

ModelSpec model_spec(const RunConfig& config);
double resolved_dt(const RunConfig& config);
SolverConfig solver_config(const RunConfig& config);

enum class Extremum { none, maximum, minimum };
std::string to_string(Extremum e);

struct MassStats {
  double initial = 0.0;
  double final = 0.0;
  Extremum extremum = Extremum::none;
  double extremum_time = 0.0;
  double extremum_value = 0.0;
};

/// Mass history summary under the trapezoid rule and the nodal mean sum(rho)/n.
struct MassReport {
  MassStats trapezoid;
  MassStats nodal_mean;
  double stationary_trapezoid = 0.0;
  double stationary_nodal_mean = 0.0;
};

MassStats mass_stats(std::span<const double> t, std::span<const double> m);
MassReport mass_report(const ObservationSeries& series, const DensityField& stationary);

struct RunSummary {
  RunConfig config;
  double dt_used = 0.0;
  long long steps = 0;
  std::optional<RateReport> fit;
  std::string fit_error;
  PredictedRate predicted;
  double final_time = 0.0;
  double final_sup_distance = 0.0;
  double final_mass = 0.0;
  double final_mass_nodal_mean = 0.0;
  double stationary_mass_closed = 0.0;
  std::optional<double> stationary_mass_numeric;
  std::optional<double> closed_vs_numeric_sup;
  std::optional<EigenResult> friedrichs;
  std::optional<EigenResult> symmetric;
  double min_value = 0.0;
  double max_value = 0.0;
  double max_entropy_increase = 0.0;
  MassReport mass;
  double wall_clock_seconds = 0.0;
};

/// Deterministic summary document; wall-clock time is left out so repeated
/// runs produce identical files.
nlohmann::json to_json(const RunSummary& summary);

struct RunResult {
  RunSummary summary;
  Trajectory trajectory;
  DensityField reference;
};

/// Runs the simulation without touching the filesystem.
RunResult simulate(const RunConfig& config, const Observer& observer = {});

/// Runs the simulation and writes the artifacts selected by config.emit into config.outputs.
RunResult run(const RunConfig& config);

void write_artifacts(const RunResult& result);

std::vector<std::string> preset_names();
/// Throws ErrorCode::config for an unknown name.
RunConfig preset(const std::string& name);
/// n = 100, dt = 2e-5 variant of a preset.
RunConfig coarsen(RunConfig config);

struct SweepRow {
  double gamma = 0.0;
  RateReport fit;
};

/// Worker count for sweeps: FOKKER_FLUX_THREADS if set, else the hardware concurrency.
int sweep_threads();

/// One model-A run per gamma, run in parallel and merged in gamma order. When
/// csv_path is given the table is written there, including the rows that
/// finished before a failure.
std::vector<SweepRow> gamma_sweep(const RunConfig& base, std::vector<double> gammas,
                                  const std::optional<std::string>& csv_path = std::nullopt,
                                  int threads = 1);

/// Runs the mass1 or mass2 preset and reports the mass history.
MassReport mass_evolution(const std::string& which, const std::optional<std::string>& out_dir = std::nullopt);

}  // namespace fokker_flux
