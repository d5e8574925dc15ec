#include "fokker_flux/spectral.hpp"

#include <fmt/format.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "fokker_flux/tridiagonal.hpp"

namespace fokker_flux {

std::string to_string(EigenEquation eq) {
  return eq == EigenEquation::friedrichs ? "friedrichs" : "symmetric";
}

double friedrichs_function(double k, double w0, double w1) {
  return (w0 + w1) * k * std::cos(k) + (w0 * w1 - k * k) * std::sin(k);
}

double symmetric_function(double k, double beta) { return beta * std::cos(k) - k * std::sin(k); }

namespace {

constexpr double kScanStart = 1e-8;
constexpr double kScanStep = 1e-3;
constexpr double kScanEnd = 4.0 * std::numbers::pi;

// Smallest root in (kScanStart, kScanEnd]: scan for the first sign change, then
// bisect until the bracket cannot shrink further in double precision.
double smallest_root(const std::function<double(double)>& g, const char* name) {
  double a = kScanStart;
  double ga = g(a);
  if (ga == 0.0) return a;
  while (a < kScanEnd) {
    const double b = std::min(a + kScanStep, kScanEnd);
    const double gb = g(b);
    if (gb == 0.0) return b;
    if ((ga < 0.0) != (gb < 0.0)) {
      double lo = a, hi = b, glo = ga;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
    }
    a = b;
    ga = gb;
  }
  throw Error(ErrorCode::root_not_found, fmt::format("{}: no sign change in (0, 4 pi]", name));
}

EigenResult make_result(double k, EigenEquation eq, double residual) {
  return EigenResult{k, k * k, 2.0 * k * k, eq, residual};
}

}  // namespace

EigenResult friedrichs_k(double w0, double w1) {
  if (!(w0 > 0.0 && w1 > 0.0) || !std::isfinite(w0) || !std::isfinite(w1)) {
    throw Error(ErrorCode::domain, fmt::format("Robin weights must be positive, got {}, {}", w0, w1));
  }
  const auto g = [=](double k) { return friedrichs_function(k, w0, w1); };
  const double k = smallest_root(g, "friedrichs_k");
  return make_result(k, EigenEquation::friedrichs, std::abs(g(k)));
}

EigenResult symmetric_k(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::domain, fmt::format("outflux rate must be positive, got {}", beta));
  }
  const auto h = [=](double k) { return symmetric_function(k, beta); };
  const double k = smallest_root(h, "symmetric_k");
  return make_result(k, EigenEquation::symmetric, std::abs(h(k)));
}

RayleighResult discrete_min_rayleigh(const Grid& grid, double w0, double w1) {
  if (!(w0 >= 0.0 && w1 >= 0.0)) {
    throw Error(ErrorCode::domain, "Robin weights must be nonnegative");
  }
  const auto n = static_cast<std::size_t>(grid.size());
  const double inv_dx = 1.0 / grid.dx();
  Tridiagonal stiffness(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    stiffness.diag[k] += inv_dx;
    stiffness.diag[k + 1] += inv_dx;
    stiffness.upper[k] -= inv_dx;
    stiffness.lower[k + 1] -= inv_dx;
  }
  stiffness.diag[0] += w0;
  stiffness.diag[n - 1] += w1;

  std::vector<double> mass(n);
  for (std::size_t k = 0; k < n; ++k) mass[k] = grid.weight(static_cast<int>(k));

  // Inverse iteration on (K - shift M) with shift = -1; all eigenvalues are
  // nonnegative, so the one nearest the shift is the smallest.
  constexpr double shift = -1.0;
  Tridiagonal shifted = stiffness;
  for (std::size_t k = 0; k < n; ++k) shifted.diag[k] -= shift * mass[k];

  auto m_norm = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += mass[k] * v[k] * v[k];
    return std::sqrt(s);
  };
  auto quotient = [&](const std::vector<double>& v) {
    const std::vector<double> kv = stiffness.multiply(v);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      num += v[k] * kv[k];
      den += mass[k] * v[k] * v[k];
    }
    return num / den;
  };

  std::vector<double> v(n, 1.0);
  double lambda = quotient(v);
  std::vector<double> rhs(n);
  for (int it = 1; it <= 10000; ++it) {
    for (std::size_t k = 0; k < n; ++k) rhs[k] = mass[k] * v[k];
    v = solve_tridiagonal(shifted, rhs);
    const double norm = m_norm(v);
    for (double& x : v) x /= norm;
    const double next = quotient(v);
    if (std::abs(next - lambda) < 1e-12) {
      return RayleighResult{next, std::move(v), it};
    }
    lambda = next;
  }
  throw Error(ErrorCode::convergence, "inverse iteration did not converge in 10000 iterations");
}

}  // namespace fokker_flux
