#pragma once

// Robin eigenvalue problems that predict the decay rate of the boundary-flux
// model, plus a discrete Rayleigh-quotient minimizer used to cross-check them.

#include <string>
#include <vector>

#include "fokker_flux/domain.hpp"

namespace fokker_flux {

enum class EigenEquation { friedrichs, symmetric };
std::string to_string(EigenEquation eq);

struct EigenResult {
  double k = 0.0;       // smallest positive root
  double lambda = 0.0;  // k^2
  double rate = 0.0;    // 2 k^2
  EigenEquation equation = EigenEquation::friedrichs;
  double root_residual = 0.0;
};

/// g(k) = (w0 + w1) k cos k + (w0 w1 - k^2) sin k, the condition for
/// phi = sin(kx) + (k / w0) cos(kx) to satisfy w0 phi(0) - phi'(0) = 0 and
/// w1 phi(1) + phi'(1) = 0.
double friedrichs_function(double k, double w0, double w1);

/// h(k) = beta cos k - k sin k, i.e. k tan k = beta.
double symmetric_function(double k, double beta);

/// Smallest k > 0 with g(k) = 0, for the quotient
/// [int phi'^2 + w0 phi(0)^2 + w1 phi(1)^2] / int phi^2.
EigenResult friedrichs_k(double w0, double w1);

/// Smallest k > 0 with k tan k = beta (eigenfunction cos(kx), Neumann at 0, Robin at 1).
EigenResult symmetric_k(double beta);

struct RayleighResult {
  double lambda = 0.0;
  std::vector<double> eigenvector;
  int iterations = 0;
};

/// Minimizes [sum (dphi)^2 / dx + w0 phi_0^2 + w1 phi_{n-1}^2] / [sum h_i phi_i^2]
/// by shifted inverse iteration on the tridiagonal pencil.
RayleighResult discrete_min_rayleigh(const Grid& grid, double w0, double w1);

}  // namespace fokker_flux
