#include <doctest.h>

#include <cmath>
#include <random>

#include "fokker_flux/entropy.hpp"
#include "fokker_flux/stationary.hpp"
#include "fokker_flux/transient.hpp"

using namespace fokker_flux;

namespace {

DensityField constant(const Grid& g, double c) {
  return DensityField(g, std::vector<double>(static_cast<std::size_t>(g.size()), c));
}

}  // namespace

TEST_CASE("entropy closed-form values") {
  const Grid g(101);
  CHECK(entropy(EntropyKind::quadratic, constant(g, 2.0), constant(g, 1.0)) == doctest::Approx(0.5));
  CHECK(entropy(EntropyKind::logarithmic, constant(g, 2.0), constant(g, 1.0)) ==
        doctest::Approx(2.0 * std::log(2.0) - 1.0));
  CHECK(entropy(EntropyKind::logarithmic, constant(g, 2.0), constant(g, 1.0)) == doctest::Approx(0.38629).epsilon(1e-5));
  CHECK(entropy(EntropyKind::two_species, constant(g, 0.25), constant(g, 0.5)) ==
        doctest::Approx(0.25 * std::log(0.5) + 0.75 * std::log(1.5)));
  CHECK(entropy(EntropyKind::two_species, constant(g, 0.25), constant(g, 0.5)) == doctest::Approx(0.13082).epsilon(1e-4));
  const DensityField inf = stationary_closed(ModelSpec{ModelKind::C, 1.0, 0.9, PotentialSpec{}}, g).field;
  for (EntropyKind k : {EntropyKind::quadratic, EntropyKind::logarithmic, EntropyKind::two_species}) {
    CHECK(entropy(k, inf, inf) == 0.0);
  }
}

TEST_CASE("entropy: zero-log convention and domain errors") {
  const Grid g(11);
  CHECK(entropy(EntropyKind::logarithmic, constant(g, 0.0), constant(g, 1.0)) == doctest::Approx(1.0));
  CHECK(entropy(EntropyKind::two_species, constant(g, 1.0), constant(g, 0.5)) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(entropy(EntropyKind::logarithmic, constant(g, 1.0), constant(g, 0.0)), Error);
  CHECK_THROWS_AS(entropy(EntropyKind::two_species, constant(g, 1.2), constant(g, 0.5)), Error);
  CHECK_THROWS_AS(entropy(EntropyKind::two_species, constant(g, 0.5), constant(g, 1.0)), Error);
}

TEST_CASE("entropies are nonnegative on random fields") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  const Grid g(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(31), b(31);
    for (std::size_t i = 0; i < 31; ++i) {
      a[i] = u(gen);
      b[i] = u(gen);
    }
    for (EntropyKind k : {EntropyKind::quadratic, EntropyKind::logarithmic, EntropyKind::two_species}) {
      CHECK(entropy(k, DensityField(g, a), DensityField(g, b)) >= 0.0);
    }
  }
}

TEST_CASE("mass and L1 distance") {
  const Grid g(200);
  CHECK(mass(constant(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  const DensityField inf = constant(g, 0.3);
  CHECK(l1_distance(inf, inf) == 0.0);
  CHECK(l1_distance(constant(g, 0.5), inf) == doctest::Approx(0.2));
}

TEST_CASE("Csiszar-Kullback constant and check") {
  const Grid g(101);
  CHECK(ck_constant(constant(g, 1.0), constant(g, 1.0)) == doctest::Approx(0.5));
  CHECK(ck_check(constant(g, 1.0), constant(g, 1.0)));
  CHECK(ck_constant(constant(g, 2.0), constant(g, 1.0)) == doctest::Approx(3.0 / 8.0));
  CHECK(ck_check(constant(g, 2.0), constant(g, 1.0)));
  try {
    ck_constant(constant(g, 0.0), constant(g, 0.0));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::undefined_constant);
  }
}

TEST_CASE("phi lemma values and limits") {
  CHECK(phi_lemma(1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(phi_lemma(1e-12, 1.0) - 1.0) < 1e-5);
  CHECK(phi_lemma(4.0, 1.0) == doctest::Approx(4.0 * std::log(4.0) - 3.0));
  CHECK(phi_lemma(4.0, 1.0) == doctest::Approx(2.5452).epsilon(1e-4));
  CHECK(phi_lemma(0.0, 3.0) == 1.0);
  // The series branch joins the closed form smoothly.
  CHECK(phi_lemma(1.0201, 1.0) == doctest::Approx(phi_lemma(1.0203, 1.0)).epsilon(1e-3));
  CHECK_THROWS_AS(phi_lemma(1.0, 0.0), Error);
  CHECK_THROWS_AS(phi_lemma(-1.0, 1.0), Error);
  CHECK(k1_bound(0.5, 1.0) == doctest::Approx(std::max(1.0, phi_lemma(0.5, 1.0))));
}

TEST_CASE("phi monotonicity on a lattice") {
  for (int i = 1; i <= 40; ++i) {
    for (int j = 1; j <= 40; ++j) {
      const double x = 0.25 * i;
      const double y = 0.25 * j;
      CHECK(phi_lemma(x + 0.25, y) >= phi_lemma(x, y) - 1e-12);
      CHECK(phi_lemma(x, y + 0.25) <= phi_lemma(x, y) + 1e-12);
    }
  }
}

TEST_CASE("elementary inequality on random pairs") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-8.0, 3.0);
  for (int k = 0; k < 10000; ++k) {
    const double a = std::exp(u(gen));
    const double b = std::exp(u(gen));
    const double lhs = (a - b) * (std::log(a) - std::log(b));
    const double d = std::sqrt(a) - std::sqrt(b);
    // Both sides agree to second order as a -> b, so allow relative roundoff.
    REQUIRE(lhs >= 4.0 * d * d * (1.0 - 1e-9));
  }
}

TEST_CASE("predicted rates") {
  const Grid g(200);
  const ModelSpec c{ModelKind::C, 1.0, 0.9, PotentialSpec{}};
  const PredictedRate pc = predicted_rate(c, stationary_closed(c, g).field, {});
  CHECK(pc.value == doctest::Approx(0.9 * std::exp(-1.0)));
  CHECK(pc.value == doctest::Approx(0.33110).epsilon(1e-4));
  CHECK(pc.source == RateSource::model_c_formula);

  const ModelSpec c1{ModelKind::C, 1.0, 1.0, PotentialSpec{PotentialKind::zero, 1.0, {}}};
  CHECK(predicted_rate(c1, stationary_closed(c1, g).field, {}).value == doctest::Approx(1.0));

  const ModelSpec a{ModelKind::A, 1.0, 1.0, PotentialSpec{PotentialKind::zero, 1.0, {}}};
  const PredictedRate pa = predicted_rate(a, stationary_closed(a, g).field, {});
  CHECK(pa.value == doctest::Approx(1.4802).epsilon(2e-3 / 1.4802));
  CHECK(pa.source == RateSource::spectral);

  const ModelSpec b{ModelKind::B, 1.0, 0.9, PotentialSpec{}};
  const DensityField inf = stationary_closed(b, g).field;
  try {
    predicted_rate(b, inf, {});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::precondition);
  }
  const double l = std::exp(1.0) / 0.9;
  const PredictedRate pb = predicted_rate(b, inf, RateBounds{l});
  CHECK(pb.value == doctest::Approx(4.0 * 0.9 * std::exp(-1.0) / std::max(1.0, phi_lemma(l, 1.0 / 0.9))));
}

TEST_CASE("exponential fit") {
  std::vector<double> t, v;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.05 * k);
    v.push_back(0.22 * std::exp(-1.04 * t.back()));
  }
  const RateReport r = fit_exponential_rate(t, v, FitWindow{0.0, 5.0});
  CHECK(std::abs(r.fitted_slope - 1.04) < 1e-9);
  CHECK(r.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(r.intercept) == doctest::Approx(0.22));
  CHECK(r.samples == 101);

  CHECK_THROWS_AS(fit_exponential_rate(t, v, FitWindow{0.0, 0.3}), Error);
  v[10] = 0.0;
  CHECK_THROWS_AS(fit_exponential_rate(t, v, FitWindow{0.0, 5.0}), Error);
}

TEST_CASE("default fit window stops before the roundoff floor") {
  std::vector<double> t, v;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(k);
    v.push_back(std::exp(-0.5 * k));
  }
  const FitWindow w = default_fit_window(t, v, 100.0);
  CHECK(w.lo == 10.0);
  CHECK(w.hi == 55.0);  // e^{-27.5} > 1e-12 > e^{-28}
}

TEST_CASE("model B run decays at the reference rate") {
  const Grid g(100);
  const ModelSpec b{ModelKind::B, 1.0, 0.9, PotentialSpec{}};
  SolverConfig cfg;
  cfg.dt = 2e-5;
  cfg.t_end = 15.0;
  cfg.observe_every = 250;
  const Trajectory t = run_transient(b, build_initial(InitialSpec{}, g, b), cfg);
  const RateReport r = fit_exponential_rate(t.series, default_fit_window(t.series.t, t.series.entropy, 15.0));
  CHECK(r.fitted_slope == doctest::Approx(1.04).epsilon(0.1));
}
