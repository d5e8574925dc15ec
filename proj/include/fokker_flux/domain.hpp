#pragma once

// Grids, potentials, model parameters and initial data on the unit interval.

#include <span>
#include <string>
#include <vector>

#include "fokker_flux/errors.hpp"

namespace fokker_flux {

/// Uniform mesh on [0,1] with n nodes, x_i = i*dx.
///
/// Each node owns a control volume of width dx, except the two boundary
/// nodes which own dx/2. These widths are also the trapezoid weights, so
/// every spatial integral in the library is a weighted nodal sum.
class Grid {
 public:
  explicit Grid(int n);

  int size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double x(int i) const noexcept { return i == n_ - 1 ? 1.0 : i * dx_; }
  double weight(int i) const noexcept { return (i == 0 || i == n_ - 1) ? 0.5 * dx_ : dx_; }
  std::vector<double> nodes() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
  double dx_;
};

Grid build_grid(int n);

enum class PotentialKind { linear, zero, scaled_linear, tabulated };

/// V(x) = gamma * base(x). The base is x for linear and scaled-linear,
/// 0 for zero, and the nodal table for tabulated.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::linear;
  double gamma = 1.0;
  std::vector<double> table;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

struct PotentialValues {
  std::vector<double> nodal;       // V(x_i), size n
  std::vector<double> face_slope;  // V' at face i+1/2, size n-1
  double max_abs_slope = 0.0;
};

PotentialValues eval_potential(const PotentialSpec& spec, const Grid& grid);

enum class ModelKind {
  A,  // linear, in/outflux through the boundary
  B,  // linear, bulk reaction alpha - beta rho e^{-V}
  C,  // crowded, bulk reaction alpha (1 - rho) - beta rho e^{-V}
};

struct ModelSpec {
  ModelKind model = ModelKind::A;
  double alpha = 1.0;
  double beta = 1.0;
  PotentialSpec potential;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Throws invalid_model unless alpha, beta are finite and strictly positive.
void validate(const ModelSpec& model);

/// Flux nonlinearity: f(rho) = rho for A/B, rho (1 - rho) for C.
inline double mobility(ModelKind kind, double rho) noexcept {
  return kind == ModelKind::C ? rho * (1.0 - rho) : rho;
}

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

/// Nodal density values over a grid.
class DensityField {
 public:
  DensityField(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](int i) const noexcept { return values_[static_cast<std::size_t>(i)]; }
  int size() const noexcept { return grid_.size(); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Checks finiteness, and nonnegativity (A/B) or [0,1] membership (C).
/// Throws invalid_initial naming the first violating node.
void validate_density(const DensityField& field, ModelKind kind);

enum class InitialKind { affine, parabola, mass1, mass2, tabulated };

struct InitialSpec {
  InitialKind kind = InitialKind::affine;
  double slope = -0.1;  // affine: rho0(x) = slope * x + offset
  double offset = 1.2;
  std::vector<double> table;

  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

/// Closed-form initial profile sampled at x.
double initial_profile(const InitialSpec& spec, double x);

DensityField build_initial(const InitialSpec& spec, const Grid& grid, const ModelSpec& model);

}  // namespace fokker_flux
