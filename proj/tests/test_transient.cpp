#include <doctest.h>

#include <cmath>
#include <limits>

#include "fokker_flux/entropy.hpp"
#include "fokker_flux/stationary.hpp"
#include "fokker_flux/transient.hpp"

using namespace fokker_flux;

namespace {

const PotentialSpec kLinear{PotentialKind::linear, 1.0, {}};
const PotentialSpec kZero{PotentialKind::zero, 1.0, {}};

DensityField constant(const Grid& g, double c) {
  return DensityField(g, std::vector<double>(static_cast<std::size_t>(g.size()), c));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::config;
}

}  // namespace

TEST_CASE("face_flux: constant density") {
  const Grid g(20);
  const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
  const DensityField rho = constant(g, 0.7);
  for (int i = 0; i < g.size() - 1; ++i) CHECK(face_flux(rho, a, i) == doctest::Approx(0.7).epsilon(1e-14));
  const ModelSpec flat{ModelKind::A, 1.0, 0.9, kZero};
  for (int i = 0; i < g.size() - 1; ++i) CHECK(face_flux(rho, flat, i) == 0.0);
  const ModelSpec c{ModelKind::C, 1.0, 0.9, kLinear};
  CHECK(face_flux(rho, c, 3) == doctest::Approx(0.7 * 0.3));
}

TEST_CASE("face_flux: out of range") {
  const Grid g(5);
  const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
  CHECK(code_of([&] { face_flux(constant(g, 1.0), a, -1); }) == ErrorCode::index);
  CHECK(code_of([&] { face_flux(constant(g, 1.0), a, 4); }) == ErrorCode::index);
}

TEST_CASE("face_flux: stationary profile carries the influx") {
  const Grid g(200);
  const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
  const DensityField closed = stationary_closed(a, g).field;
  for (int i = 0; i < g.size() - 1; ++i) CHECK(std::abs(face_flux(closed, a, i) - 1.0) < 5.0 * g.dx() * g.dx());
  const DensityField numeric = stationary_numeric(a, g).field;
  for (int i = 0; i < g.size() - 1; ++i) CHECK(std::abs(face_flux(numeric, a, i) - 1.0) < 1e-10);
}

TEST_CASE("flux_field boundary faces") {
  const Grid g(11);
  const DensityField rho = constant(g, 0.5);
  const FluxField fa = flux_field(rho, ModelSpec{ModelKind::A, 1.3, 0.9, kLinear});
  REQUIRE(fa.faces.size() == 12);
  CHECK(fa.faces.front() == 1.3);
  CHECK(fa.faces.back() == 0.9 * 0.5);
  for (ModelKind m : {ModelKind::B, ModelKind::C}) {
    const FluxField f = flux_field(rho, ModelSpec{m, 1.3, 0.9, kLinear});
    CHECK(f.faces.front() == 0.0);
    CHECK(f.faces.back() == 0.0);
  }
}

TEST_CASE("cfl_max_dt reference values") {
  const Grid g(200);
  const double dx = g.dx();
  const double v0 = cfl_max_dt(ModelSpec{ModelKind::B, 1.0, 0.9, kZero}, g);
  CHECK(v0 == doctest::Approx(dx * dx / 2.0).epsilon(1e-3));
  CHECK(v0 == doctest::Approx(1.263e-5).epsilon(1e-3));
  const double v1 = cfl_max_dt(ModelSpec{ModelKind::A, 1.0, 0.9, kLinear}, g);
  CHECK(v1 == doctest::Approx(dx * dx / (2.0 + dx)).epsilon(1e-12));
  for (ModelKind m : {ModelKind::A, ModelKind::B, ModelKind::C}) {
    CHECK(5e-6 <= cfl_max_dt(ModelSpec{m, 1.0, 0.9, kLinear}, g));
  }
}

TEST_CASE("step_explicit: no blow-up at half the bound with V = 0") {
  const Grid g(200);
  const ModelSpec b{ModelKind::B, 1.0, 0.9, kZero};
  const double dt = 0.5 * cfl_max_dt(b, g);
  DensityField rho = build_initial(InitialSpec{InitialKind::mass2, 0, 0, {}}, g, b);
  for (int k = 0; k < 20000; ++k) rho = step_explicit(rho, b, dt);
  for (double v : rho.values()) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
}

TEST_CASE("step_explicit: stability and divergence errors") {
  const Grid g(50);
  const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
  const double bound = cfl_max_dt(a, g);
  CHECK(code_of([&] { step_explicit(constant(g, 1.0), a, 1.01 * bound); }) == ErrorCode::stability);
  std::vector<double> wild(50, 0.0);
  for (std::size_t i = 0; i < wild.size(); i += 2) wild[i] = std::numeric_limits<double>::max();
  CHECK(code_of([&] { step_explicit(DensityField(g, wild), a, bound); }) == ErrorCode::divergence);
}

TEST_CASE("step_explicit: model B stationary state is a fixed point") {
  const Grid g(200);
  const ModelSpec b{ModelKind::B, 1.0, 0.9, kLinear};
  const DensityField inf = stationary_closed(b, g).field;
  const double dt = 5e-6;
  const DensityField next = step_explicit(inf, b, dt);
  const double res = residual_stationary(inf, b);
  CHECK(sup_distance(next.values(), inf.values()) <= res * dt * (1.0 + 1e-6) + 1e-15);
  const DensityField exact = stationary_numeric(b, g).field;
  CHECK(sup_distance(step_explicit(exact, b, dt).values(), exact.values()) < 1e-14);
}

TEST_CASE("discrete mass balance for model A is exact") {
  const Grid g(200);
  const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
  DensityField rho = build_initial(InitialSpec{InitialKind::mass1, 0, 0, {}}, g, a);
  const double dt = 5e-6;
  for (int k = 0; k < 2000; ++k) {
    const double before = mass(rho);
    const double out = rho[g.size() - 1];
    rho = step_explicit(rho, a, dt);
    CHECK(std::abs(mass(rho) - before - dt * (1.0 - 0.9 * out)) < 1e-12);
  }
}

TEST_CASE("positivity and box preservation") {
  const Grid g(100);
  for (ModelKind m : {ModelKind::A, ModelKind::B}) {
    const ModelSpec spec{m, 1.0, 0.9, kLinear};
    DensityField rho = build_initial(InitialSpec{InitialKind::mass2, 0, 0, {}}, g, spec);
    const double dt = cfl_max_dt(spec, g);
    for (int k = 0; k < 5000; ++k) {
      rho = step_explicit(rho, spec, dt);
      for (double v : rho.values()) REQUIRE(v >= -1e-12);
    }
  }
  const ModelSpec c{ModelKind::C, 1.0, 0.9, kLinear};
  DensityField rho = build_initial(InitialSpec{InitialKind::parabola, 0, 0, {}}, g, c);
  const double dt = cfl_max_dt(c, g);
  for (int k = 0; k < 5000; ++k) {
    rho = step_explicit(rho, c, dt);
    for (double v : rho.values()) REQUIRE((v >= -1e-12 && v <= 1.0 + 1e-12));
  }
}

TEST_CASE("step_implicit_entropy") {
  const Grid g(200);
  const ModelSpec c{ModelKind::C, 1.0, 0.9, kLinear};
  const DensityField inf = stationary_closed(c, g).field;
  const NewtonConfig newton;

  SUBCASE("stationary state is a fixed point") {
    const DensityField next = step_implicit_entropy(inf, c, 1e-3, newton);
    CHECK(sup_distance(next.values(), inf.values()) < 1e-9);
  }
  SUBCASE("clipped parabola: inside the box, entropy does not increase") {
    std::vector<double> v;
    for (double x : g.nodes()) v.push_back(std::clamp(-(x - 0.5) * (x - 0.5) + 1.0, 0.01, 0.99));
    DensityField rho(g, v);
    double e = entropy(EntropyKind::two_species, rho, inf);
    for (int k = 0; k < 200; ++k) {
      rho = step_implicit_entropy(rho, c, 1e-3, newton);
      for (double r : rho.values()) REQUIRE((r > 0.0 && r < 1.0));
      const double next = entropy(EntropyKind::two_species, rho, inf);
      CHECK(next <= e + 1e-10);
      e = next;
    }
  }
  SUBCASE("Newton failure") {
    std::vector<double> v(200, 0.02);
    CHECK(code_of([&] { step_implicit_entropy(DensityField(g, v), c, 10.0, NewtonConfig{1, 1e-14, 0}); }) ==
          ErrorCode::step_failure);
  }
  SUBCASE("other models rejected") {
    CHECK(code_of([&] { step_implicit_entropy(inf, ModelSpec{ModelKind::B, 1.0, 0.9, kLinear}, 1e-3, newton); }) ==
          ErrorCode::precondition);
  }
}

TEST_CASE("residual_stationary") {
  SUBCASE("numeric stationary state") {
    const Grid g(200);
    for (ModelKind m : {ModelKind::A, ModelKind::B}) {
      const ModelSpec spec{m, 1.0, 0.9, kLinear};
      CHECK(residual_stationary(stationary_numeric(spec, g).field, spec) < 1e-10);
    }
  }
  SUBCASE("closed form: interior rows are second order") {
    const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
    double prev = 0.0;
    for (int n : {51, 101, 201}) {
      const Grid g(n);
      const auto rows = stationary_residual_rows(stationary_closed(a, g).field, a);
      double interior = 0.0;
      for (std::size_t i = 1; i + 1 < rows.size(); ++i) interior = std::max(interior, std::abs(rows[i]));
      if (prev > 0.0) CHECK(prev / interior == doctest::Approx(4.0).epsilon(0.05));
      prev = interior;
    }
  }
  SUBCASE("shifted model B equilibrium with V = 0") {
    const Grid g(50);
    const ModelSpec b{ModelKind::B, 1.0, 0.9, kZero};
    const DensityField inf = stationary_closed(b, g).field;
    std::vector<double> v(inf.values().begin(), inf.values().end());
    for (double& x : v) x += 0.1;
    CHECK(residual_stationary(DensityField(g, v), b) == doctest::Approx(0.1 * 0.9).epsilon(1e-9));
  }
}

TEST_CASE("run_transient: zero final time keeps only the initial field") {
  const Grid g(20);
  const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
  const DensityField rho0 = build_initial(InitialSpec{}, g, a);
  SolverConfig cfg;
  cfg.t_end = 0.0;
  const Trajectory t = run_transient(a, rho0, cfg);
  CHECK(t.steps == 0);
  REQUIRE(t.snapshots.size() == 1);
  CHECK(t.snapshots[0].values()[3] == rho0[3]);
  CHECK(t.series.size() == 1);
}

TEST_CASE("run_transient: sampling, snapshots and the mass series") {
  const Grid g(100);
  const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
  const DensityField rho0 = build_initial(InitialSpec{}, g, a);
  SolverConfig cfg;
  cfg.dt = 2e-5;
  cfg.t_end = 0.5;
  cfg.observe_every = 1;
  cfg.snapshot_times = {0.0, 0.1, 0.5};
  cfg.monitor_every_step = true;
  const Trajectory t = run_transient(a, rho0, cfg);
  CHECK(t.steps == 25000);
  REQUIRE(t.snapshot_times.size() == 3);
  CHECK(t.snapshot_times[1] == doctest::Approx(0.1));
  CHECK(t.final_time == 0.5);
  CHECK(t.max_entropy_increase <= 1e-10);
  CHECK(t.min_value >= 0.0);
  for (std::size_t k = 1; k < t.series.size(); ++k) CHECK(t.series.t[k] > t.series.t[k - 1]);
  // Replaying the recorded outflow reproduces the mass series.
  DensityField rho = rho0;
  double m = mass(rho0);
  for (int k = 0; k < 100; ++k) {
    m += cfg.dt * (1.0 - 0.9 * rho[g.size() - 1]);
    rho = step_explicit(rho, a, cfg.dt);
  }
  CHECK(std::abs(t.series.mass[100] - m) < 1e-12);
}

TEST_CASE("run_transient: step errors carry the failure time") {
  const Grid g(200);
  const ModelSpec c{ModelKind::C, 1.0, 0.9, kLinear};
  std::vector<double> v(200, 0.02);
  SolverConfig cfg;
  cfg.dt = 10.0;
  cfg.t_end = 20.0;
  cfg.scheme = Scheme::implicit_entropy;
  cfg.newton = NewtonConfig{1, 1e-14, 0};
  try {
    run_transient(c, DensityField(g, v), cfg);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::step_failure);
    REQUIRE(e.time().has_value());
    CHECK(*e.time() == 10.0);
  }
}
