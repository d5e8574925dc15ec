#include "fokker_flux/tridiagonal.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "fokker_flux/errors.hpp"

namespace fokker_flux {

std::vector<double> Tridiagonal::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += lower[i] * x[i - 1];
    if (i + 1 < n) s += upper[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

bool Tridiagonal::is_symmetric(double tol) const {
  for (std::size_t i = 0; i + 1 < size(); ++i) {
    if (std::abs(upper[i] - lower[i + 1]) > tol * std::max(1.0, std::abs(upper[i]))) return false;
  }
  return true;
}

bool Tridiagonal::is_diagonally_dominant() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    if (i > 0) off += std::abs(lower[i]);
    if (i + 1 < n) off += std::abs(upper[i]);
    if (std::abs(diag[i]) < off) return false;
  }
  return true;
}

std::vector<double> solve_tridiagonal(const Tridiagonal& m, std::span<const double> rhs) {
  const std::size_t n = m.size();
  if (rhs.size() != n || n == 0) {
    throw Error(ErrorCode::shape, "tridiagonal system and right-hand side sizes differ");
  }
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);
  double pivot = m.diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) pivot = m.diag[i] - m.lower[i] * c[i - 1];
    if (!(std::abs(pivot) > std::numeric_limits<double>::min())) {
      throw Error(ErrorCode::solver, fmt::format("singular tridiagonal system: zero pivot in row {}", i));
    }
    c[i] = (i + 1 < n) ? m.upper[i] / pivot : 0.0;
    d[i] = (rhs[i] - (i > 0 ? m.lower[i] * d[i - 1] : 0.0)) / pivot;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace fokker_flux
