#pragma once

#include <span>
#include <vector>

#include "fokker_flux/domain.hpp"
#include "fokker_flux/tridiagonal.hpp"

namespace fokker_flux {

enum class StationaryMethod { closed_form, numeric };

struct StationarySolution {
  DensityField field;
  StationaryMethod method;
  ModelSpec model;
  double residual;  // residual_stationary of field under the time-stepping scheme
};

StationarySolution stationary_modelA_closed(double alpha, double beta, const PotentialSpec& potential,
                                            const Grid& grid);
StationarySolution stationary_modelB_closed(double alpha, double beta, const PotentialSpec& potential,
                                            const Grid& grid);
StationarySolution stationary_modelC_closed(double alpha, double beta, const PotentialSpec& potential,
                                            const Grid& grid);
StationarySolution stationary_closed(const ModelSpec& model, const Grid& grid);

/// Symmetric system for the discrete Slotboom variable u = rho / w.
///
/// The weights w satisfy w_{i+1} / w_i = (1 + dx V'/2) / (1 - dx V'/2), a
/// discrete Boltzmann factor with w_0 = e^{V(0)}. With it the face flux of the
/// time-stepping scheme becomes -c_f (u_{i+1} - u_i) / dx with c_f ~ e^{V} at
/// the face, so the assembled operator is symmetric.
struct SlotboomSystem {
  Tridiagonal matrix;
  std::vector<double> rhs;
  std::vector<double> weights;       // w_i
  std::vector<double> face_coeffs;   // c_{i+1/2}
};

SlotboomSystem assemble_slotboom(const ModelSpec& model, const Grid& grid);

/// Direct solve followed by two rounds of iterative refinement started from `guess`.
std::vector<double> solve_slotboom(const SlotboomSystem& system, std::span<const double> guess);

/// Models A and B only; throws ErrorCode::precondition for model C, whose
/// stationary state is the closed form.
StationarySolution stationary_numeric(const ModelSpec& model, const Grid& grid);

/// Stationary field used as the entropy reference in transient runs:
/// numeric for A/B, closed form for C.
StationarySolution reference_stationary(const ModelSpec& model, const Grid& grid);

}  // namespace fokker_flux
