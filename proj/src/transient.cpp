#include "fokker_flux/transient.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fokker_flux/stationary.hpp"
#include "fokker_flux/tridiagonal.hpp"

namespace fokker_flux {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::explicit_euler ? "explicit" : "implicit-entropy";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "explicit") return Scheme::explicit_euler;
  if (name == "implicit-entropy") return Scheme::implicit_entropy;
  throw Error(ErrorCode::config, fmt::format("unknown scheme '{}'", name));
}

Discretization::Discretization(const ModelSpec& model, const Grid& grid)
    : model_(model), grid_(grid), potential_(eval_potential(model.potential, grid)),
      inv_dx_(1.0 / grid.dx()) {
  validate(model);
  exp_minus_v_.resize(potential_.nodal.size());
  std::transform(potential_.nodal.begin(), potential_.nodal.end(), exp_minus_v_.begin(),
                 [](double v) { return std::exp(-v); });
}

double Discretization::left_flux(std::span<const double>) const noexcept {
  return model_.model == ModelKind::A ? model_.alpha : 0.0;
}

double Discretization::right_flux(std::span<const double> rho) const noexcept {
  return model_.model == ModelKind::A ? model_.beta * rho.back() : 0.0;
}

void Discretization::fluxes(std::span<const double> rho, std::span<double> out) const {
  const int n = grid_.size();
  out[0] = left_flux(rho);
  for (int i = 0; i + 1 < n; ++i) out[static_cast<std::size_t>(i + 1)] = interior_flux(rho, i);
  out[static_cast<std::size_t>(n)] = right_flux(rho);
}

void Discretization::steady_residual(std::span<const double> rho, std::span<double> out) const {
  const int n = grid_.size();
  std::vector<double> j(static_cast<std::size_t>(n + 1));
  fluxes(rho, j);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = (j[k + 1] - j[k]) / grid_.weight(i) - reaction(rho[k], i);
  }
}

FluxField flux_field(const DensityField& rho, const ModelSpec& model) {
  const Discretization disc(model, rho.grid());
  FluxField f;
  f.faces.resize(static_cast<std::size_t>(rho.size() + 1));
  disc.fluxes(rho.values(), f.faces);
  return f;
}

double face_flux(const DensityField& rho, const ModelSpec& model, int i) {
  if (i < 0 || i > rho.size() - 2) {
    throw Error(ErrorCode::index,
                fmt::format("face index {} is not an interior face (valid: 0..{})", i, rho.size() - 2));
  }
  const Discretization disc(model, rho.grid());
  return disc.interior_flux(rho.values(), i);
}

double cfl_max_dt(const ModelSpec& model, const Grid& grid) {
  const PotentialValues pot = eval_potential(model.potential, grid);
  const int n = grid.size();
  const double dx = grid.dx();
  // J_{i+1/2} = a rho_i - b rho_{i+1}; for the crowded model the drift part is
  // scaled by f'(rho) in [-1, 1], so only |V'| can be used.
  auto slope = [&](int face) {
    const double s = pot.face_slope[static_cast<std::size_t>(face)];
    return model.model == ModelKind::C ? std::abs(s) : s;
  };
  auto a = [&](int face) { return 1.0 / dx + 0.5 * slope(face); };
  auto b = [&](int face) {
    const double s = model.model == ModelKind::C ? std::abs(slope(face)) : -slope(face);
    return 1.0 / dx + 0.5 * s;
  };

  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double out = 0.0;
    if (i + 1 < n) out += a(i);
    if (i > 0) out += b(i - 1);
    if (i == n - 1 && model.model == ModelKind::A) out += model.beta;
    double d = out / grid.weight(i);
    const double emv = std::exp(-pot.nodal[static_cast<std::size_t>(i)]);
    if (model.model == ModelKind::B) d += model.beta * emv;
    if (model.model == ModelKind::C) d += model.alpha + model.beta * emv;
    worst = std::max(worst, d);
  }
  return 1.0 / worst;
}

namespace {

// Relative slack when comparing dt against the CFL bound, so that dt set to
// exactly the bound survives roundoff.
constexpr double kCflSlack = 1e-12;

class ExplicitStepper {
 public:
  explicit ExplicitStepper(const Discretization& disc)
      : disc_(disc), flux_(static_cast<std::size_t>(disc.grid().size() + 1)) {
    const int n = disc.grid().size();
    inv_h_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) inv_h_[static_cast<std::size_t>(i)] = 1.0 / disc.grid().weight(i);
  }

  void advance(std::span<double> rho, double dt) {
    disc_.fluxes(rho, flux_);
    const std::size_t n = rho.size();
    for (std::size_t k = 0; k < n; ++k) {
      rho[k] += -dt * inv_h_[k] * (flux_[k + 1] - flux_[k]) + dt * disc_.reaction(rho[k], static_cast<int>(k));
    }
  }

 private:
  const Discretization& disc_;
  std::vector<double> flux_;
  std::vector<double> inv_h_;
};

void check_finite(std::span<const double> rho, double t) {
  for (std::size_t k = 0; k < rho.size(); ++k) {
    if (!std::isfinite(rho[k])) {
      throw Error(ErrorCode::divergence,
                  fmt::format("non-finite density at node {} after step ending at t = {}", k, t), t);
    }
  }
}

void check_cfl(const ModelSpec& model, const Grid& grid, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::stability, fmt::format("time step must be positive, got {}", dt));
  const double bound = cfl_max_dt(model, grid);
  if (dt > bound * (1.0 + kCflSlack)) {
    throw Error(ErrorCode::stability,
                fmt::format("dt = {} exceeds the explicit stability bound {}", dt, bound));
  }
}

double logistic(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Backward Euler in the entropy variable for the crowded model.
class ImplicitEntropyStepper {
 public:
  ImplicitEntropyStepper(const Discretization& disc, NewtonConfig newton)
      : disc_(disc), newton_(newton) {
    if (disc.model().model != ModelKind::C) {
      throw Error(ErrorCode::precondition, "the implicit entropy scheme is defined for model C only");
    }
  }

  // Advances rho in place; throws step_failure if Newton does not converge.
  void advance(std::span<double> rho, double dt, double t_end_of_step) {
    const Grid& grid = disc_.grid();
    const int n = grid.size();
    const auto pot = disc_.potential();
    old_.assign(rho.begin(), rho.end());
    u_.resize(rho.size());
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (!(rho[k] > 0.0 && rho[k] < 1.0)) {
        throw Error(ErrorCode::precondition,
                    fmt::format("implicit entropy step needs 0 < rho < 1, node {} has {}", i, rho[k]),
                    t_end_of_step);
      }
      u_[k] = std::log(rho[k]) - std::log1p(-rho[k]) - pot[k];
    }

    double norm = residual(u_, dt, f_);
    for (int iter = 0; iter < newton_.max_iter; ++iter) {
      if (norm < newton_.tolerance) {
        fill_density(u_, rho);
        return;
      }
      const Tridiagonal jac = jacobian(u_, dt);
      std::vector<double> rhs(f_.size());
      std::transform(f_.begin(), f_.end(), rhs.begin(), [](double v) { return -v; });
      const std::vector<double> delta = solve_tridiagonal(jac, rhs);

      double step = 1.0;
      std::vector<double> trial(u_.size());
      std::vector<double> trial_f(u_.size());
      double trial_norm = std::numeric_limits<double>::infinity();
      for (int h = 0; h <= newton_.max_halvings; ++h) {
        for (std::size_t k = 0; k < u_.size(); ++k) trial[k] = u_[k] + step * delta[k];
        trial_norm = residual(trial, dt, trial_f);
        if (trial_norm < norm) break;
        step *= 0.5;
      }
      u_.swap(trial);
      f_.swap(trial_f);
      norm = trial_norm;
    }
    if (norm < newton_.tolerance) {
      fill_density(u_, rho);
      return;
    }
    throw Error(ErrorCode::step_failure,
                fmt::format("Newton did not converge in {} iterations, residual {:.3e}",
                            newton_.max_iter, norm),
                t_end_of_step);
  }

 private:
  void fill_density(std::span<const double> u, std::span<double> rho) const {
    const auto pot = disc_.potential();
    for (std::size_t k = 0; k < u.size(); ++k) rho[k] = logistic(u[k] + pot[k]);
  }

  // F_i = rho_i - rho_i^old + dt / h_i (J_{i+1/2} - J_{i-1/2}) - dt R_i, returns sup |F|.
  double residual(std::span<const double> u, double dt, std::vector<double>& f) {
    const Grid& grid = disc_.grid();
    const int n = grid.size();
    const double inv_dx = 1.0 / grid.dx();
    rho_.resize(u.size());
    fill_density(u, rho_);
    flux_.assign(static_cast<std::size_t>(n + 1), 0.0);
    for (int i = 0; i + 1 < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double mean = 0.5 * (rho_[k] + rho_[k + 1]);
      flux_[k + 1] = -mean * (1.0 - mean) * (u[k + 1] - u[k]) * inv_dx;
    }
    f.resize(u.size());
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      f[k] = rho_[k] - old_[k] + dt / grid.weight(i) * (flux_[k + 1] - flux_[k]) -
             dt * disc_.reaction(rho_[k], i);
      if (!std::isfinite(f[k])) return std::numeric_limits<double>::infinity();
      norm = std::max(norm, std::abs(f[k]));
    }
    return norm;
  }

  Tridiagonal jacobian(std::span<const double> u, double dt) {
    const Grid& grid = disc_.grid();
    const int n = grid.size();
    const double inv_dx = 1.0 / grid.dx();
    const auto emv = disc_.exp_minus_potential();
    const double alpha = disc_.model().alpha;
    const double beta = disc_.model().beta;
    rho_.resize(u.size());
    fill_density(u, rho_);

    Tridiagonal jac(u.size());
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double s = rho_[k] * (1.0 - rho_[k]);
      jac.diag[k] = s + dt * (alpha + beta * emv[k]) * s;
    }
    // Face i+1/2 contributes +dJ/du to row i and -dJ/du to row i+1.
    for (int i = 0; i + 1 < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double mean = 0.5 * (rho_[k] + rho_[k + 1]);
      const double m = mean * (1.0 - mean);
      const double dm = 1.0 - 2.0 * mean;
      const double grad = (u[k + 1] - u[k]) * inv_dx;
      const double s_l = rho_[k] * (1.0 - rho_[k]);
      const double s_r = rho_[k + 1] * (1.0 - rho_[k + 1]);
      const double dj_dl = m * inv_dx - grad * dm * 0.5 * s_l;
      const double dj_dr = -m * inv_dx - grad * dm * 0.5 * s_r;
      const double c_l = dt / grid.weight(i);
      const double c_r = dt / grid.weight(i + 1);
      jac.diag[k] += c_l * dj_dl;
      jac.upper[k] += c_l * dj_dr;
      jac.lower[k + 1] -= c_r * dj_dl;
      jac.diag[k + 1] -= c_r * dj_dr;
    }
    return jac;
  }

  const Discretization& disc_;
  NewtonConfig newton_;
  std::vector<double> old_;
  std::vector<double> u_;
  std::vector<double> f_;
  std::vector<double> rho_;
  std::vector<double> flux_;
};

}  // namespace

DensityField step_explicit(const DensityField& rho, const ModelSpec& model, double dt) {
  check_cfl(model, rho.grid(), dt);
  const Discretization disc(model, rho.grid());
  ExplicitStepper stepper(disc);
  DensityField next = rho;
  stepper.advance(next.values(), dt);
  check_finite(next.values(), dt);
  return next;
}

DensityField step_implicit_entropy(const DensityField& rho, const ModelSpec& model, double dt,
                                   const NewtonConfig& newton) {
  if (!(dt > 0.0)) throw Error(ErrorCode::stability, "time step must be positive");
  const Discretization disc(model, rho.grid());
  ImplicitEntropyStepper stepper(disc, newton);
  DensityField next = rho;
  stepper.advance(next.values(), dt, dt);
  return next;
}

std::vector<double> stationary_residual_rows(const DensityField& rho, const ModelSpec& model) {
  const Discretization disc(model, rho.grid());
  std::vector<double> rows(static_cast<std::size_t>(rho.size()));
  disc.steady_residual(rho.values(), rows);
  return rows;
}

double residual_stationary(const DensityField& rho, const ModelSpec& model) {
  double worst = 0.0;
  for (double r : stationary_residual_rows(rho, model)) worst = std::max(worst, std::abs(r));
  return worst;
}

namespace {

struct Sampler {
  const Discretization& disc;
  const RunReference& ref;
  ObservationSeries& series;
  std::vector<double> rows;

  void sample(double t, std::span<const double> rho) {
    const Grid& grid = disc.grid();
    const auto inf = ref.stationary.values();
    series.t.push_back(t);
    series.entropy.push_back(entropy(ref.entropy, rho, inf, grid));
    series.mass.push_back(mass(rho, grid));
    series.mass_nodal_mean.push_back(nodal_mean_mass(rho));
    series.l1.push_back(l1_distance(rho, inf, grid));
    rows.resize(rho.size());
    disc.steady_residual(rho, rows);
    double worst = 0.0;
    for (double r : rows) worst = std::max(worst, std::abs(r));
    series.residual.push_back(worst);
  }
};

void validate_solver_config(const SolverConfig& config) {
  if (!(std::isfinite(config.dt) && config.dt > 0.0)) {
    throw Error(ErrorCode::config, fmt::format("dt must be positive and finite, got {}", config.dt));
  }
  if (!(std::isfinite(config.t_end) && config.t_end >= 0.0)) {
    throw Error(ErrorCode::config, fmt::format("t_end must be nonnegative and finite, got {}", config.t_end));
  }
  if (config.observe_every < 1) {
    throw Error(ErrorCode::config, "observe_every must be at least 1");
  }
  for (double s : config.snapshot_times) {
    if (!(s >= 0.0 && s <= config.t_end)) {
      throw Error(ErrorCode::config,
                  fmt::format("snapshot time {} outside [0, t_end = {}]", s, config.t_end));
    }
  }
}

}  // namespace

Trajectory run_transient(const ModelSpec& model, const DensityField& initial,
                         const SolverConfig& config, const RunReference& reference,
                         const Observer& observer) {
  validate_solver_config(config);
  const Grid& grid = initial.grid();
  if (!(reference.stationary.grid() == grid)) {
    throw Error(ErrorCode::shape, "reference stationary field lives on a different grid");
  }
  const Discretization disc(model, grid);
  validate_density(initial, model.model);
  if (config.scheme == Scheme::explicit_euler) {
    check_cfl(model, grid, config.dt);
  } else if (model.model != ModelKind::C) {
    throw Error(ErrorCode::config, "the implicit entropy scheme is defined for model C only");
  }

  std::optional<ExplicitStepper> explicit_stepper;
  std::optional<ImplicitEntropyStepper> implicit_stepper;
  if (config.scheme == Scheme::explicit_euler) {
    explicit_stepper.emplace(disc);
  } else {
    implicit_stepper.emplace(disc, config.newton);
  }

  long long steps = 0;
  if (config.t_end > 0.0) {
    steps = static_cast<long long>(std::ceil(config.t_end / config.dt - 1e-9));
    steps = std::max<long long>(steps, 1);
  }
  auto time_of = [&](long long k) {
    return k == steps ? config.t_end : static_cast<double>(k) * config.dt;
  };

  std::vector<double> pending = config.snapshot_times;
  std::sort(pending.begin(), pending.end());
  pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
  std::size_t next_snapshot = 0;

  Trajectory traj{.snapshot_times = {},
                  .snapshots = {},
                  .series = {},
                  .final_field = initial,
                  .final_time = 0.0,
                  .steps = steps,
                  .min_value = 0.0,
                  .max_value = 0.0,
                  .max_entropy_increase = -std::numeric_limits<double>::infinity()};
  DensityField current = initial;
  auto rho = current.values();
  Sampler sampler{disc, reference, traj.series, {}};

  auto take_snapshots = [&](long long k) {
    const double t = time_of(k);
    const double half = 0.5 * config.dt;
    bool taken = false;
    while (next_snapshot < pending.size() && (t >= pending[next_snapshot] - half || k == steps)) {
      if (!taken) {
        traj.snapshot_times.push_back(t);
        traj.snapshots.push_back(current);
        taken = true;
      }
      ++next_snapshot;
    }
  };

  const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
  traj.min_value = *lo;
  traj.max_value = *hi;

  sampler.sample(0.0, rho);
  if (observer) observer(0.0, current);
  if (pending.empty()) {
    traj.snapshot_times.push_back(0.0);
    traj.snapshots.push_back(current);
  } else {
    take_snapshots(0);
  }

  double last_entropy = traj.series.entropy.back();
  double last_sampled_entropy = last_entropy;
  for (long long k = 1; k <= steps; ++k) {
    const double t = time_of(k);
    const double dt = t - time_of(k - 1);
    if (explicit_stepper) {
      explicit_stepper->advance(rho, dt);
    } else {
      implicit_stepper->advance(rho, dt, t);
    }
    for (double v : rho) {
      if (!std::isfinite(v)) check_finite(rho, t);
      traj.min_value = std::min(traj.min_value, v);
      traj.max_value = std::max(traj.max_value, v);
    }
    if (config.monitor_every_step) {
      const double e = entropy(reference.entropy, rho, reference.stationary.values(), grid);
      traj.max_entropy_increase = std::max(traj.max_entropy_increase, e - last_entropy);
      last_entropy = e;
    }
    if (k % config.observe_every == 0 || k == steps) {
      sampler.sample(t, rho);
      if (!config.monitor_every_step) {
        const double e = traj.series.entropy.back();
        traj.max_entropy_increase = std::max(traj.max_entropy_increase, e - last_sampled_entropy);
        last_sampled_entropy = e;
      }
      if (observer) observer(t, current);
    }
    if (!pending.empty()) take_snapshots(k);
  }

  if (pending.empty() && steps > 0) {
    traj.snapshot_times.push_back(config.t_end);
    traj.snapshots.push_back(current);
  }
  if (steps == 0) traj.max_entropy_increase = 0.0;
  traj.final_time = config.t_end;
  traj.final_field = current;
  return traj;
}

Trajectory run_transient(const ModelSpec& model, const DensityField& initial,
                         const SolverConfig& config) {
  const StationarySolution ref = reference_stationary(model, initial.grid());
  return run_transient(model, initial, config, RunReference{ref.field, default_entropy(model.model)});
}

}  // namespace fokker_flux
