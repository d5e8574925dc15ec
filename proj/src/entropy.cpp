#include "fokker_flux/entropy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fokker_flux/spectral.hpp"

namespace fokker_flux {

EntropyKind default_entropy(ModelKind model) noexcept {
  switch (model) {
    case ModelKind::A: return EntropyKind::quadratic;
    case ModelKind::B: return EntropyKind::logarithmic;
    case ModelKind::C: return EntropyKind::two_species;
  }
  return EntropyKind::quadratic;
}

std::string to_string(EntropyKind kind) {
  switch (kind) {
    case EntropyKind::quadratic: return "quadratic";
    case EntropyKind::logarithmic: return "logarithmic";
    case EntropyKind::two_species: return "two-species";
  }
  return "?";
}

namespace {

// a log(a / b), with 0 log 0 = 0.
double xlogx_ratio(double a, double b) { return a > 0.0 ? a * std::log(a / b) : 0.0; }

}  // namespace

double entropy_density(EntropyKind kind, double rho, double rho_inf) {
  switch (kind) {
    case EntropyKind::quadratic: {
      const double d = rho - rho_inf;
      return 0.5 * d * d / rho_inf;
    }
    case EntropyKind::logarithmic:
      return xlogx_ratio(rho, rho_inf) - (rho - rho_inf);
    case EntropyKind::two_species:
      return xlogx_ratio(rho, rho_inf) + xlogx_ratio(1.0 - rho, 1.0 - rho_inf);
  }
  return 0.0;
}

double entropy(EntropyKind kind, std::span<const double> rho, std::span<const double> rho_inf,
               const Grid& grid) {
  if (rho.size() != rho_inf.size() || static_cast<int>(rho.size()) != grid.size()) {
    throw Error(ErrorCode::shape, "entropy arguments have mismatched sizes");
  }
  double sum = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double ri = rho_inf[k];
    if (!(ri > 0.0) || (kind == EntropyKind::two_species && !(ri < 1.0))) {
      throw Error(ErrorCode::domain, fmt::format("reference density {} at node {} outside its domain", ri, i));
    }
    double r = rho[k];
    if (kind != EntropyKind::quadratic) {
      const double upper = kind == EntropyKind::two_species ? 1.0 : INFINITY;
      if (!(r >= -kBoxSlack && r <= upper + kBoxSlack)) {
        throw Error(ErrorCode::domain, fmt::format("density {} at node {} outside the entropy domain", r, i));
      }
      r = std::clamp(r, 0.0, upper);
    }
    sum += grid.weight(i) * entropy_density(kind, r, ri);
  }
  return sum;
}

double entropy(EntropyKind kind, const DensityField& rho, const DensityField& rho_inf) {
  return entropy(kind, rho.values(), rho_inf.values(), rho.grid());
}

double mass(std::span<const double> rho, const Grid& grid) {
  double sum = 0.0;
  for (int i = 0; i < grid.size(); ++i) sum += grid.weight(i) * rho[static_cast<std::size_t>(i)];
  return sum;
}

double mass(const DensityField& rho) { return mass(rho.values(), rho.grid()); }

double nodal_mean_mass(std::span<const double> rho) {
  return std::accumulate(rho.begin(), rho.end(), 0.0) / static_cast<double>(rho.size());
}

double l1_distance(std::span<const double> rho, std::span<const double> rho_inf, const Grid& grid) {
  double sum = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    sum += grid.weight(i) * std::abs(rho[k] - rho_inf[k]);
  }
  return sum;
}

double l1_distance(const DensityField& rho, const DensityField& rho_inf) {
  return l1_distance(rho.values(), rho_inf.values(), rho.grid());
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

double ck_constant(const DensityField& rho, const DensityField& rho_inf) {
  auto l1_norm = [](const DensityField& f) {
    double sum = 0.0;
    for (int i = 0; i < f.size(); ++i) sum += f.grid().weight(i) * std::abs(f[i]);
    return sum;
  };
  const double m = l1_norm(rho);
  const double m_inf = l1_norm(rho_inf);
  const double denom = 2.0 * m + 4.0 * m_inf;
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::undefined_constant, "Csiszar-Kullback constant undefined: both masses vanish");
  }
  return 3.0 / denom;
}

bool ck_check(const DensityField& rho, const DensityField& rho_inf) {
  const double e = entropy(EntropyKind::logarithmic, rho, rho_inf);
  const double l1 = l1_distance(rho, rho_inf);
  return e >= ck_constant(rho, rho_inf) * l1 * l1 - 1e-12;
}

double phi_lemma(double x, double y) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw Error(ErrorCode::domain, fmt::format("phi(x, y) needs y > 0, got y = {}", y));
  }
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::domain, fmt::format("phi(x, y) needs x >= 0, got x = {}", x));
  }
  if (x == 0.0) return 1.0;
  // phi depends only on s = sqrt(x / y): (2 s^2 log s - s^2 + 1) / (s - 1)^2.
  const double s = std::sqrt(x / y);
  const double e = s - 1.0;
  if (std::abs(e) < 1e-2) {
    return 2.0 + e * (2.0 / 3.0 + e * (-1.0 / 6.0 + e * (1.0 / 15.0 + e * (-1.0 / 30.0 + e * 2.0 / 105.0))));
  }
  const double r = x / y;
  return (r * std::log(r) - (r - 1.0)) / (e * e);
}

double k1_bound(double upper_bound, double rho_inf_min) {
  return std::max(1.0, phi_lemma(upper_bound, rho_inf_min));
}

std::string to_string(RateSource source) {
  switch (source) {
    case RateSource::spectral: return "spectral";
    case RateSource::model_b_formula: return "model-B-formula";
    case RateSource::model_c_formula: return "model-C-formula";
  }
  return "?";
}

PredictedRate predicted_rate(const ModelSpec& model, const DensityField& rho_inf,
                             const RateBounds& bounds) {
  validate(model);
  const auto inf = rho_inf.values();
  switch (model.model) {
    case ModelKind::A:
      return {symmetric_k(model.beta).rate, RateSource::spectral};
    case ModelKind::B: {
      if (!bounds.upper_bound) {
        throw Error(ErrorCode::precondition, "model B rate needs the upper bound L = max{|rho_inf|, |rho_0|}");
      }
      const PotentialValues pot = eval_potential(model.potential, rho_inf.grid());
      double k2 = INFINITY;
      for (double v : pot.nodal) k2 = std::min(k2, std::exp(-v));
      const double inf_min = *std::min_element(inf.begin(), inf.end());
      const double k1 = k1_bound(*bounds.upper_bound, inf_min);
      return {4.0 * model.beta * k2 / k1, RateSource::model_b_formula};
    }
    case ModelKind::C: {
      double ratio = INFINITY;
      for (double r : inf) ratio = std::min(ratio, (1.0 - r) / r);
      return {model.alpha * std::min(1.0, ratio), RateSource::model_c_formula};
    }
  }
  throw Error(ErrorCode::invalid_model, "unknown model");
}

FitWindow default_fit_window(std::span<const double> t, std::span<const double> values, double t_end) {
  FitWindow w{0.1 * t_end, 0.0};
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(values[k] > kFitFloor)) break;
    w.hi = t[k];
  }
  return w;
}

RateReport fit_exponential_rate(std::span<const double> t, std::span<const double> values,
                                FitWindow window) {
  if (t.size() != values.size()) throw Error(ErrorCode::shape, "time and value series differ in length");
  if (!(window.hi > window.lo)) {
    throw Error(ErrorCode::fit, fmt::format("empty fit window [{}, {}]", window.lo, window.hi));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < window.lo || t[k] > window.hi) continue;
    if (!(values[k] > kFitFloor)) {
      throw Error(ErrorCode::fit,
                  fmt::format("value {} at t = {} is not above the roundoff floor {}", values[k], t[k], kFitFloor));
    }
    xs.push_back(t[k]);
    ys.push_back(std::log(values[k]));
  }
  if (xs.size() < 10) {
    throw Error(ErrorCode::fit, fmt::format("fit window holds {} samples, need at least 10", xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx;
    const double dy = ys[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::fit, "fit window has no spread in time");
  const double slope = sxy / sxx;
  RateReport report;
  report.fitted_slope = -slope;
  report.intercept = my - slope * mx;
  report.window = window;
  report.samples = xs.size();
  report.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return report;
}

RateReport fit_exponential_rate(const ObservationSeries& series, FitWindow window) {
  return fit_exponential_rate(series.t, series.entropy, window);
}

}  // namespace fokker_flux
