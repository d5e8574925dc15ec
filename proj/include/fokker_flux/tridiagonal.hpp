#pragma once

#include <span>
#include <vector>

namespace fokker_flux {

/// Tridiagonal matrix: row i holds lower[i] (column i-1), diag[i], upper[i] (column i+1).
/// lower[0] and upper[n-1] are unused.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
  std::size_t size() const noexcept { return diag.size(); }

  std::vector<double> multiply(std::span<const double> x) const;
  bool is_symmetric(double tol = 0.0) const;
  /// |diag_i| >= sum of off-diagonal magnitudes in every row.
  bool is_diagonally_dominant() const;
};

/// Thomas elimination without pivoting. Throws ErrorCode::solver on a zero pivot.
std::vector<double> solve_tridiagonal(const Tridiagonal& m, std::span<const double> rhs);

}  // namespace fokker_flux
