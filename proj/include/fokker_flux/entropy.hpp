#pragma once

// Relative entropies, mass and L1 observables, the functional inequalities
// behind the decay estimates, and log-linear rate fitting.

#include <optional>
#include <span>
#include <string>

#include "fokker_flux/domain.hpp"
#include "fokker_flux/observation.hpp"

namespace fokker_flux {

enum class EntropyKind {
  quadratic,    // 1/2 (rho - rho_inf)^2 / rho_inf
  logarithmic,  // rho log(rho / rho_inf) - (rho - rho_inf)
  two_species,  // rho log(rho / rho_inf) + (1 - rho) log((1 - rho) / (1 - rho_inf))
};

EntropyKind default_entropy(ModelKind model) noexcept;
std::string to_string(EntropyKind kind);

/// Roundoff slack allowed outside [0, inf) or [0, 1] before entropy() reports a domain error.
inline constexpr double kBoxSlack = 1e-12;

/// Nodal density of the relative entropy; 0 log 0 is taken as 0.
double entropy_density(EntropyKind kind, double rho, double rho_inf);

/// Trapezoid integral of the relative entropy density. Throws ErrorCode::domain when
/// rho_inf has a nonpositive node (or a node >= 1 for two-species) or rho leaves its box.
double entropy(EntropyKind kind, std::span<const double> rho, std::span<const double> rho_inf,
               const Grid& grid);
double entropy(EntropyKind kind, const DensityField& rho, const DensityField& rho_inf);

double mass(std::span<const double> rho, const Grid& grid);
double mass(const DensityField& rho);
/// sum(rho) / n, the rectangle-rule mass (differs from the trapezoid mass by O(dx)).
double nodal_mean_mass(std::span<const double> rho);
double l1_distance(std::span<const double> rho, std::span<const double> rho_inf, const Grid& grid);
double l1_distance(const DensityField& rho, const DensityField& rho_inf);
double sup_distance(std::span<const double> a, std::span<const double> b);

/// K4 = 3 / (2 ||rho||_1 + 4 ||rho_inf||_1) from the Csiszar-Kullback inequality
/// for non-normalized densities.
double ck_constant(const DensityField& rho, const DensityField& rho_inf);

/// E_log(rho | rho_inf) >= K4 ||rho - rho_inf||_1^2 - 1e-12.
bool ck_check(const DensityField& rho, const DensityField& rho_inf);

/// phi(x, y) = [x (log x - log y) - (x - y)] / (sqrt(x) - sqrt(y))^2,
/// extended by phi(y, y) = 2 and phi(0, y) = 1. Requires x >= 0, y > 0.
double phi_lemma(double x, double y);

/// K1 = max{1, phi(L, rho_inf_min)}.
double k1_bound(double upper_bound, double rho_inf_min);

enum class RateSource { spectral, model_b_formula, model_c_formula };
std::string to_string(RateSource source);

struct PredictedRate {
  double value = 0.0;
  RateSource source = RateSource::spectral;
};

struct RateBounds {
  /// L = max{||rho_inf||_inf, ||rho_0||_inf}; required for model B.
  std::optional<double> upper_bound;
};

/// Analytic decay rate of the model's relative entropy.
/// A: 2 lambda of the symmetric part (k tan k = beta);
/// B: 4 beta K2 / K1 with K2 = inf e^{-V};
/// C: alpha min{1, inf (1 - rho_inf) / rho_inf}.
PredictedRate predicted_rate(const ModelSpec& model, const DensityField& rho_inf,
                             const RateBounds& bounds);

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct RateReport {
  double fitted_slope = 0.0;  // decay reported as a positive rate
  double intercept = 0.0;     // log value at t = 0
  FitWindow window;
  double r_squared = 0.0;
  std::size_t samples = 0;
  std::optional<PredictedRate> predicted;
};

/// Smallest value the fit accepts; below this the series is roundoff.
inline constexpr double kFitFloor = 1e-12;

/// [0.1 t_end, t*] with t* the last sample whose value exceeds kFitFloor.
FitWindow default_fit_window(std::span<const double> t, std::span<const double> values,
                             double t_end);

/// Least-squares line through (t, log value) over samples with t in the window.
RateReport fit_exponential_rate(std::span<const double> t, std::span<const double> values,
                                FitWindow window);
RateReport fit_exponential_rate(const ObservationSeries& series, FitWindow window);

}  // namespace fokker_flux
