#include "fokker_flux/stationary.hpp"

#include <fmt/format.h>

#include <cmath>

#include "fokker_flux/transient.hpp"

namespace fokker_flux {

namespace {

void require_rates(double alpha, double beta) {
  validate(ModelSpec{ModelKind::A, alpha, beta, PotentialSpec{PotentialKind::zero, 1.0, {}}});
}

StationarySolution finish(std::vector<double> values, StationaryMethod method, const ModelSpec& model,
                          const Grid& grid) {
  DensityField field(grid, std::move(values));
  const double residual = residual_stationary(field, model);
  return StationarySolution{std::move(field), method, model, residual};
}

// Integral of e^{-V} from x to 1 for the analytic kinds; nodal table for the rest.
std::vector<double> tail_integrals(const PotentialSpec& potential, const Grid& grid,
                                   std::span<const double> v) {
  const int n = grid.size();
  std::vector<double> tail(static_cast<std::size_t>(n), 0.0);
  const bool analytic = potential.kind != PotentialKind::tabulated;
  const double g = potential.kind == PotentialKind::zero ? 0.0 : potential.gamma;
  for (int i = 0; i < n; ++i) {
    const double x = grid.x(i);
    if (analytic) {
      // (e^{-g x} - e^{-g}) / g, written to stay accurate as g -> 0.
      tail[static_cast<std::size_t>(i)] =
          g == 0.0 ? 1.0 - x : std::exp(-g * x) * (-std::expm1(-g * (1.0 - x))) / g;
    }
  }
  if (!analytic) {
    for (int i = n - 2; i >= 0; --i) {
      const auto k = static_cast<std::size_t>(i);
      tail[k] = tail[k + 1] + 0.5 * grid.dx() * (std::exp(-v[k]) + std::exp(-v[k + 1]));
    }
  }
  return tail;
}

}  // namespace

StationarySolution stationary_modelA_closed(double alpha, double beta, const PotentialSpec& potential,
                                            const Grid& grid) {
  require_rates(alpha, beta);
  const ModelSpec model{ModelKind::A, alpha, beta, potential};
  const PotentialValues pot = eval_potential(potential, grid);
  const std::vector<double> tail = tail_integrals(potential, grid, pot.nodal);
  const double v1 = pot.nodal.back();
  // rho(x) = (C - alpha int_0^x e^{-V}) e^{V(x)}, C = alpha (e^{-V(1)} / beta + int_0^1 e^{-V}).
  std::vector<double> values(static_cast<std::size_t>(grid.size()));
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = alpha * (std::exp(pot.nodal[k] - v1) / beta + tail[k] * std::exp(pot.nodal[k]));
  }
  return finish(std::move(values), StationaryMethod::closed_form, model, grid);
}

StationarySolution stationary_modelB_closed(double alpha, double beta, const PotentialSpec& potential,
                                            const Grid& grid) {
  require_rates(alpha, beta);
  const ModelSpec model{ModelKind::B, alpha, beta, potential};
  const PotentialValues pot = eval_potential(potential, grid);
  std::vector<double> values(pot.nodal.size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = alpha / beta * std::exp(pot.nodal[k]);
  return finish(std::move(values), StationaryMethod::closed_form, model, grid);
}

StationarySolution stationary_modelC_closed(double alpha, double beta, const PotentialSpec& potential,
                                            const Grid& grid) {
  require_rates(alpha, beta);
  const ModelSpec model{ModelKind::C, alpha, beta, potential};
  const PotentialValues pot = eval_potential(potential, grid);
  const double shift = std::log(alpha / beta);
  std::vector<double> values(pot.nodal.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    // z / (1 + z) with z = (alpha / beta) e^V, as a logistic in log z.
    const double s = shift + pot.nodal[k];
    values[k] = s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
  }
  return finish(std::move(values), StationaryMethod::closed_form, model, grid);
}

StationarySolution stationary_closed(const ModelSpec& model, const Grid& grid) {
  switch (model.model) {
    case ModelKind::A: return stationary_modelA_closed(model.alpha, model.beta, model.potential, grid);
    case ModelKind::B: return stationary_modelB_closed(model.alpha, model.beta, model.potential, grid);
    case ModelKind::C: return stationary_modelC_closed(model.alpha, model.beta, model.potential, grid);
  }
  throw Error(ErrorCode::invalid_model, "unknown model");
}

SlotboomSystem assemble_slotboom(const ModelSpec& model, const Grid& grid) {
  validate(model);
  if (model.model == ModelKind::C) {
    throw Error(ErrorCode::precondition, "Slotboom assembly applies to the linear models A and B");
  }
  const int n = grid.size();
  const double dx = grid.dx();
  const PotentialValues pot = eval_potential(model.potential, grid);
  const auto un = static_cast<std::size_t>(n);

  SlotboomSystem sys{Tridiagonal(un), std::vector<double>(un, 0.0), std::vector<double>(un),
                     std::vector<double>(un - 1)};
  sys.weights[0] = std::exp(pot.nodal[0]);
  for (std::size_t k = 0; k + 1 < un; ++k) {
    const double s = pot.face_slope[k];
    const double up = 2.0 + dx * s;
    const double down = 2.0 - dx * s;
    if (!(up > 0.0 && down > 0.0)) {
      throw Error(ErrorCode::solver,
                  fmt::format("drift too strong for the grid at face {}: dx |V'| = {} >= 2", k,
                              dx * std::abs(s)));
    }
    sys.weights[k + 1] = sys.weights[k] * up / down;
    sys.face_coeffs[k] = 0.5 * up * sys.weights[k];
  }

  auto& m = sys.matrix;
  for (std::size_t k = 0; k + 1 < un; ++k) {
    const double c = sys.face_coeffs[k] / dx;
    m.diag[k] += c;
    m.diag[k + 1] += c;
    m.upper[k] -= c;
    m.lower[k + 1] -= c;
  }
  if (model.model == ModelKind::A) {
    sys.rhs[0] += model.alpha;
    m.diag[un - 1] += model.beta * sys.weights[un - 1];
  } else {
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double h = grid.weight(i);
      m.diag[k] += h * model.beta * std::exp(-pot.nodal[k]) * sys.weights[k];
      sys.rhs[k] += h * model.alpha;
    }
  }
  return sys;
}

std::vector<double> solve_slotboom(const SlotboomSystem& system, std::span<const double> guess) {
  std::vector<double> x(guess.begin(), guess.end());
  if (x.size() != system.rhs.size()) throw Error(ErrorCode::shape, "initial guess has the wrong size");
  for (int round = 0; round < 3; ++round) {
    const std::vector<double> ax = system.matrix.multiply(x);
    std::vector<double> r(x.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = system.rhs[k] - ax[k];
    const std::vector<double> delta = solve_tridiagonal(system.matrix, r);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += delta[k];
  }
  return x;
}

StationarySolution stationary_numeric(const ModelSpec& model, const Grid& grid) {
  if (model.model == ModelKind::C) {
    throw Error(ErrorCode::precondition,
                "numeric stationary solve covers models A and B; use the closed form for model C");
  }
  const SlotboomSystem sys = assemble_slotboom(model, grid);
  const std::vector<double> zero(sys.rhs.size(), 0.0);
  const std::vector<double> u = solve_slotboom(sys, zero);
  std::vector<double> rho(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    rho[k] = sys.weights[k] * u[k];
    if (!std::isfinite(rho[k])) throw Error(ErrorCode::solver, "stationary solve produced a non-finite value");
  }
  return finish(std::move(rho), StationaryMethod::numeric, model, grid);
}

StationarySolution reference_stationary(const ModelSpec& model, const Grid& grid) {
  return model.model == ModelKind::C ? stationary_closed(model, grid) : stationary_numeric(model, grid);
}

}  // namespace fokker_flux
