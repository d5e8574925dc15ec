#pragma once

#include <cstddef>
#include <vector>

namespace fokker_flux {

/// Scalars sampled along a transient run, one row per sampled step.
struct ObservationSeries {
  std::vector<double> t;
  std::vector<double> entropy;
  std::vector<double> mass;             // trapezoid
  std::vector<double> mass_nodal_mean;  // sum(rho) / n
  std::vector<double> l1;
  std::vector<double> residual;

  std::size_t size() const noexcept { return t.size(); }
};

}  // namespace fokker_flux
