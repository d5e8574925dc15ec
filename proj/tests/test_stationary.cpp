#include <doctest.h>

#include <cmath>

#include "fokker_flux/entropy.hpp"
#include "fokker_flux/stationary.hpp"

using namespace fokker_flux;

namespace {

const PotentialSpec kLinear{PotentialKind::linear, 1.0, {}};
const PotentialSpec kZero{PotentialKind::zero, 1.0, {}};

}  // namespace

TEST_CASE("model A closed form") {
  const Grid g(200);
  const StationarySolution s = stationary_modelA_closed(1.0, 0.9, kLinear, g);
  CHECK(s.field[g.size() - 1] == doctest::Approx(1.0 / 0.9).epsilon(1e-14));
  // Pointwise formula alpha + (1/(beta e) - 1/e) alpha e^x.
  for (int i = 0; i < g.size(); i += 17) {
    const double x = g.x(i);
    CHECK(s.field[i] == doctest::Approx(1.0 + (1.0 / (0.9 * std::exp(1.0)) - std::exp(-1.0)) * std::exp(x)));
  }
  CHECK(mass(s.field) == doctest::Approx(1.0703).epsilon(0.002 / 1.0703));
  for (double v : s.field.values()) CHECK(v > 0.0);

  const StationarySolution flat = stationary_modelA_closed(1.0, 1.0, kZero, g);
  for (int i = 0; i < g.size(); ++i) CHECK(flat.field[i] == doctest::Approx(2.0 - g.x(i)));
  CHECK(flat.field[g.size() - 1] == doctest::Approx(1.0));
}

TEST_CASE("model B closed form") {
  const Grid g(11);
  const StationarySolution one = stationary_modelB_closed(0.7, 0.7, kZero, g);
  for (double v : one.field.values()) CHECK(v == doctest::Approx(1.0));
  const StationarySolution two = stationary_modelB_closed(2.0, 1.0, kZero, g);
  for (double v : two.field.values()) CHECK(v == doctest::Approx(2.0));
  CHECK(stationary_modelB_closed(1.0, 0.9, kLinear, g).field[10] == doctest::Approx(std::exp(1.0) / 0.9));
  CHECK(std::exp(1.0) / 0.9 == doctest::Approx(3.0207).epsilon(1e-4));
}

TEST_CASE("model C closed form") {
  const Grid g(11);
  const StationarySolution half = stationary_modelC_closed(0.3, 0.3, kZero, g);
  for (double v : half.field.values()) CHECK(v == doctest::Approx(0.5));
  CHECK(stationary_modelC_closed(1.0, 0.9, kLinear, g).field[10] == doctest::Approx(0.7513).epsilon(1e-4));
  const StationarySolution sparse = stationary_modelC_closed(1e-6, 1.0, kZero, g);
  for (double v : sparse.field.values()) {
    CHECK(v == doctest::Approx(1e-6).epsilon(1e-5));
  }
  const StationarySolution tilted = stationary_modelC_closed(1.0, 0.9, kLinear, g);
  for (double v : tilted.field.values()) CHECK((v > 0.0 && v < 1.0));
}

TEST_CASE("closed forms reject invalid rates") {
  const Grid g(11);
  CHECK_THROWS_AS(stationary_modelA_closed(0.0, 1.0, kLinear, g), Error);
  CHECK_THROWS_AS(stationary_modelB_closed(1.0, -1.0, kLinear, g), Error);
  try {
    stationary_modelC_closed(1.0, 0.0, kLinear, g);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_model);
  }
}

TEST_CASE("numeric model A agrees with the closed form") {
  const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
  const Grid g(200);
  CHECK(sup_distance(stationary_numeric(a, g).field.values(), stationary_closed(a, g).field.values()) < 1e-6);
}

TEST_CASE("numeric model B: exact for V = 0, second order otherwise") {
  const ModelSpec flat{ModelKind::B, 1.0, 0.9, kZero};
  const Grid g(200);
  CHECK(sup_distance(stationary_numeric(flat, g).field.values(), stationary_closed(flat, g).field.values()) < 1e-8);

  const ModelSpec b{ModelKind::B, 1.0, 0.9, kLinear};
  double prev = 0.0;
  for (int n : {51, 101, 201, 401}) {
    const Grid gn(n);
    const double err = sup_distance(stationary_numeric(b, gn).field.values(), stationary_closed(b, gn).field.values());
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("numeric model A error decreases with dx^2") {
  const ModelSpec a{ModelKind::A, 1.0, 0.9, kLinear};
  double prev = 0.0;
  for (int n : {26, 51, 101}) {
    const Grid g(n);
    const double err = sup_distance(stationary_numeric(a, g).field.values(), stationary_closed(a, g).field.values());
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("Slotboom system is symmetric and diagonally dominant") {
  const Grid g(200);
  for (ModelKind m : {ModelKind::A, ModelKind::B}) {
    for (double gamma : {0.0, 1.0, 3.0}) {
      const SlotboomSystem sys =
          assemble_slotboom(ModelSpec{m, 1.0, 0.9, PotentialSpec{PotentialKind::scaled_linear, gamma, {}}}, g);
      CHECK(sys.matrix.is_symmetric(1e-12));
      CHECK(sys.matrix.is_diagonally_dominant());
    }
  }
  CHECK_THROWS_AS(assemble_slotboom(ModelSpec{ModelKind::C, 1.0, 0.9, kLinear}, g), Error);
}

TEST_CASE("solution does not depend on the refinement guess") {
  const Grid g(200);
  const SlotboomSystem sys = assemble_slotboom(ModelSpec{ModelKind::A, 1.0, 0.9, kLinear}, g);
  const std::vector<double> zero(200, 0.0);
  std::vector<double> other(200);
  for (std::size_t i = 0; i < other.size(); ++i) other[i] = std::sin(0.3 * static_cast<double>(i)) * 5.0;
  CHECK(sup_distance(solve_slotboom(sys, zero), solve_slotboom(sys, other)) < 1e-12);
}

TEST_CASE("numeric solve refuses model C and strong drift") {
  CHECK_THROWS_AS(stationary_numeric(ModelSpec{ModelKind::C, 1.0, 0.9, kLinear}, Grid(20)), Error);
  try {
    stationary_numeric(ModelSpec{ModelKind::A, 1.0, 0.9, PotentialSpec{PotentialKind::scaled_linear, 50.0, {}}},
                       Grid(11));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::solver);
  }
  const StationarySolution ref = reference_stationary(ModelSpec{ModelKind::C, 1.0, 0.9, kLinear}, Grid(20));
  CHECK(ref.method == StationaryMethod::closed_form);
}
