#pragma once

// Conservative finite-difference time stepping for the three models.
//
// Node i owns a control volume of width h_i (dx, or dx/2 at the ends) and
// evolves by
//     d rho_i / dt = -(J_{i+1/2} - J_{i-1/2}) / h_i + R_i(rho_i)
// with interior faces
//     J_{i+1/2} = -(rho_{i+1} - rho_i) / dx + f((rho_i + rho_{i+1}) / 2) V'_{i+1/2}
// and boundary faces J_{-1/2} = alpha, J_{n-1/2} = beta rho_{n-1} for model A,
// zero for B and C.

#include <functional>
#include <span>
#include <vector>

#include "fokker_flux/domain.hpp"
#include "fokker_flux/entropy.hpp"
#include "fokker_flux/observation.hpp"

namespace fokker_flux {

enum class Scheme { explicit_euler, implicit_entropy };
std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct NewtonConfig {
  int max_iter = 50;
  double tolerance = 1e-10;  // sup-norm of the nodal residual
  int max_halvings = 8;

  friend bool operator==(const NewtonConfig&, const NewtonConfig&) = default;
};

struct SolverConfig {
  double dt = 5e-6;
  double t_end = 1.0;
  int observe_every = 1000;
  Scheme scheme = Scheme::explicit_euler;
  NewtonConfig newton;
  std::vector<double> snapshot_times;
  /// Evaluate the entropy after every step to track the largest per-step increase.
  bool monitor_every_step = false;
};

/// Model coefficients precomputed on a grid.
class Discretization {
 public:
  Discretization(const ModelSpec& model, const Grid& grid);

  const ModelSpec& model() const noexcept { return model_; }
  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> potential() const noexcept { return potential_.nodal; }
  std::span<const double> face_slope() const noexcept { return potential_.face_slope; }
  std::span<const double> exp_minus_potential() const noexcept { return exp_minus_v_; }

  /// J at interior face i+1/2, i in [0, n-2].
  double interior_flux(std::span<const double> rho, int i) const noexcept {
    const auto k = static_cast<std::size_t>(i);
    const double mean = 0.5 * (rho[k] + rho[k + 1]);
    return -(rho[k + 1] - rho[k]) * inv_dx_ + mobility(model_.model, mean) * potential_.face_slope[k];
  }
  double left_flux(std::span<const double> rho) const noexcept;
  double right_flux(std::span<const double> rho) const noexcept;

  /// R_i(rho_i).
  double reaction(double rho, int i) const noexcept {
    const double out = model_.beta * rho * exp_minus_v_[static_cast<std::size_t>(i)];
    switch (model_.model) {
      case ModelKind::A: return 0.0;
      case ModelKind::B: return model_.alpha - out;
      case ModelKind::C: return model_.alpha * (1.0 - rho) - out;
    }
    return 0.0;
  }

  /// All n+1 face fluxes; out[k] is the flux through face k-1/2.
  void fluxes(std::span<const double> rho, std::span<double> out) const;

  /// Nodal rows (J_{i+1/2} - J_{i-1/2}) / h_i - R_i.
  void steady_residual(std::span<const double> rho, std::span<double> out) const;

 private:
  ModelSpec model_;
  Grid grid_;
  PotentialValues potential_;
  std::vector<double> exp_minus_v_;
  double inv_dx_;
};

/// Face fluxes J_{k-1/2}, k = 0..n, including both boundary faces.
struct FluxField {
  std::vector<double> faces;
};

FluxField flux_field(const DensityField& rho, const ModelSpec& model);

/// J_{i+1/2} for an interior face i in [0, n-2]; throws ErrorCode::index otherwise.
double face_flux(const DensityField& rho, const ModelSpec& model, int i);

/// Largest dt for which every nodal update of the explicit scheme is a
/// nonnegative combination of the old values (positivity, and the box [0,1]
/// for model C). Reduces to dx^2 / (2 + dx |V'|) when the inflow node binds.
double cfl_max_dt(const ModelSpec& model, const Grid& grid);

DensityField step_explicit(const DensityField& rho, const ModelSpec& model, double dt);

/// Backward Euler for model C in the entropy variable u = log(rho / (1 - rho)) - V,
/// rho = logistic(u + V), flux -rho(1 - rho) du/dx. Solved by damped Newton.
DensityField step_implicit_entropy(const DensityField& rho, const ModelSpec& model, double dt,
                                   const NewtonConfig& newton);

std::vector<double> stationary_residual_rows(const DensityField& rho, const ModelSpec& model);

/// sup_i |(J_{i+1/2} - J_{i-1/2}) / h_i - R_i|.
double residual_stationary(const DensityField& rho, const ModelSpec& model);

struct Trajectory {
  std::vector<double> snapshot_times;
  std::vector<DensityField> snapshots;
  ObservationSeries series;
  DensityField final_field;
  double final_time = 0.0;
  long long steps = 0;
  double min_value = 0.0;  // over every iterate
  double max_value = 0.0;
  /// Largest per-step entropy increase (monitor_every_step) or per-sample increase otherwise.
  double max_entropy_increase = 0.0;
};

struct RunReference {
  DensityField stationary;
  EntropyKind entropy;
};

/// Called at every sampled step with the current time and field.
using Observer = std::function<void(double, const DensityField&)>;

Trajectory run_transient(const ModelSpec& model, const DensityField& initial,
                         const SolverConfig& config, const RunReference& reference,
                         const Observer& observer = {});

/// Uses reference_stationary() and the model's default entropy.
Trajectory run_transient(const ModelSpec& model, const DensityField& initial,
                         const SolverConfig& config);

}  // namespace fokker_flux
