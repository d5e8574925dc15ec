#include "fokker_flux/domain.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fokker_flux {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_grid: return "invalid-grid";
    case ErrorCode::shape: return "shape";
    case ErrorCode::invalid_initial: return "invalid-initial";
    case ErrorCode::invalid_model: return "invalid-model";
    case ErrorCode::index: return "index";
    case ErrorCode::stability: return "stability";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::step_failure: return "step-failure";
    case ErrorCode::solver: return "solver";
    case ErrorCode::domain: return "domain";
    case ErrorCode::fit: return "fit";
    case ErrorCode::undefined_constant: return "undefined-constant";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::root_not_found: return "root-not-found";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Grid::Grid(int n) : n_(n), dx_(0.0) {
  if (n < 3) {
    throw Error(ErrorCode::invalid_grid, fmt::format("grid needs at least 3 nodes, got {}", n));
  }
  dx_ = 1.0 / (n - 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = x(i);
  return out;
}

Grid build_grid(int n) { return Grid(n); }

PotentialValues eval_potential(const PotentialSpec& spec, const Grid& grid) {
  if (!std::isfinite(spec.gamma)) {
    throw Error(ErrorCode::invalid_model, "potential scaling gamma must be finite");
  }
  const int n = grid.size();
  PotentialValues out;
  out.nodal.resize(static_cast<std::size_t>(n));
  out.face_slope.resize(static_cast<std::size_t>(n - 1));

  switch (spec.kind) {
    case PotentialKind::zero:
      std::fill(out.nodal.begin(), out.nodal.end(), 0.0);
      std::fill(out.face_slope.begin(), out.face_slope.end(), 0.0);
      break;
    case PotentialKind::linear:
    case PotentialKind::scaled_linear:
      for (int i = 0; i < n; ++i) out.nodal[static_cast<std::size_t>(i)] = spec.gamma * grid.x(i);
      std::fill(out.face_slope.begin(), out.face_slope.end(), spec.gamma);
      break;
    case PotentialKind::tabulated: {
      if (static_cast<int>(spec.table.size()) != n) {
        throw Error(ErrorCode::shape,
                    fmt::format("tabulated potential has {} values, grid has {} nodes",
                                spec.table.size(), n));
      }
      for (int i = 0; i < n; ++i) {
        const double v = spec.table[static_cast<std::size_t>(i)];
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::shape, fmt::format("tabulated potential not finite at node {}", i));
        }
        out.nodal[static_cast<std::size_t>(i)] = spec.gamma * v;
      }
      for (int i = 0; i + 1 < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out.face_slope[k] = (out.nodal[k + 1] - out.nodal[k]) / grid.dx();
      }
      break;
    }
  }
  for (double s : out.face_slope) out.max_abs_slope = std::max(out.max_abs_slope, std::abs(s));
  return out;
}

void validate(const ModelSpec& model) {
  if (!(std::isfinite(model.alpha) && model.alpha > 0.0)) {
    throw Error(ErrorCode::invalid_model,
                fmt::format("influx rate alpha = {} violates assumption α ≥ α0 > 0",
                            model.alpha));
  }
  if (!(std::isfinite(model.beta) && model.beta > 0.0)) {
    throw Error(ErrorCode::invalid_model,
                fmt::format("outflux rate beta = {} violates assumption β ≥ β0 > 0", model.beta));
  }
  if (!std::isfinite(model.potential.gamma)) {
    throw Error(ErrorCode::invalid_model, "potential scaling gamma must be finite");
  }
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::A: return "A";
    case ModelKind::B: return "B";
    case ModelKind::C: return "C";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "A") return ModelKind::A;
  if (name == "B") return ModelKind::B;
  if (name == "C") return ModelKind::C;
  throw Error(ErrorCode::config, fmt::format("unknown model '{}' (expected A, B or C)", name));
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::linear: return "linear";
    case PotentialKind::zero: return "zero";
    case PotentialKind::scaled_linear: return "scaled-linear";
    case PotentialKind::tabulated: return "tabulated";
  }
  return "?";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "linear") return PotentialKind::linear;
  if (name == "zero") return PotentialKind::zero;
  if (name == "scaled-linear") return PotentialKind::scaled_linear;
  if (name == "tabulated") return PotentialKind::tabulated;
  throw Error(ErrorCode::config, fmt::format("unknown potential kind '{}'", name));
}

DensityField::DensityField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size()) {
    throw Error(ErrorCode::shape, fmt::format("density has {} values, grid has {} nodes",
                                              values_.size(), grid_.size()));
  }
}

void validate_density(const DensityField& field, ModelKind kind) {
  const auto v = field.values();
  for (int i = 0; i < field.size(); ++i) {
    const double r = v[static_cast<std::size_t>(i)];
    const double x = field.grid().x(i);
    if (!std::isfinite(r)) {
      throw Error(ErrorCode::invalid_initial,
                  fmt::format("density not finite at node {} (x = {})", i, x));
    }
    if (r < 0.0) {
      throw Error(ErrorCode::invalid_initial,
                  fmt::format("density negative at node {} (x = {}): {}", i, x, r));
    }
    if (kind == ModelKind::C && r > 1.0) {
      throw Error(ErrorCode::invalid_initial,
                  fmt::format("density exceeds the box constraint 1 at node {} (x = {}): {}", i, x,
                              r));
    }
  }
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::affine: return "affine";
    case InitialKind::parabola: return "parabola";
    case InitialKind::mass1: return "mass1";
    case InitialKind::mass2: return "mass2";
    case InitialKind::tabulated: return "tabulated";
  }
  return "?";
}

InitialKind initial_kind_from_string(const std::string& name) {
  if (name == "affine") return InitialKind::affine;
  if (name == "parabola") return InitialKind::parabola;
  if (name == "mass1") return InitialKind::mass1;
  if (name == "mass2") return InitialKind::mass2;
  if (name == "tabulated") return InitialKind::tabulated;
  throw Error(ErrorCode::config, fmt::format("unknown initial kind '{}'", name));
}

double initial_profile(const InitialSpec& spec, double x) {
  switch (spec.kind) {
    case InitialKind::affine:
      return spec.slope * x + spec.offset;
    case InitialKind::parabola:
      return -(x - 0.5) * (x - 0.5) + 1.0;
    case InitialKind::mass1:
      // Plateau, half a cosine period down to zero, then empty. The cosine
      // amplitude is 0.5 so the pieces join at x = 0.5 and x = 0.75.
      if (x < 0.5) return 1.9;
      if (x <= 0.75) return 1.9 * (0.5 * std::cos(4.0 * std::numbers::pi * x) + 0.5);
      return 0.0;
    case InitialKind::mass2:
      return x < 0.9 ? 0.0 : 3000.0 * (x - 0.9) * (x - 0.9);
    case InitialKind::tabulated:
      break;
  }
  throw Error(ErrorCode::invalid_initial, "tabulated initial data has no closed form");
}

DensityField build_initial(const InitialSpec& spec, const Grid& grid, const ModelSpec& model) {
  const int n = grid.size();
  std::vector<double> values(static_cast<std::size_t>(n));
  if (spec.kind == InitialKind::tabulated) {
    if (static_cast<int>(spec.table.size()) != n) {
      throw Error(ErrorCode::shape, fmt::format("tabulated initial data has {} values, grid has {}",
                                                spec.table.size(), n));
    }
    values = spec.table;
  } else {
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = initial_profile(spec, grid.x(i));
  }
  DensityField field(grid, std::move(values));
  validate_density(field, model.model);
  return field;
}

}  // namespace fokker_flux
