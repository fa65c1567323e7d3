#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "sche/expr.hpp"
#include "sche/model.hpp"
#include "sche/norms.hpp"

using namespace sche;

namespace {

// Example drift f(u) = (u^3 + u^2 - u + 1) / 3 and matching initial profile.
ModelParams example_params() {
  ModelParams params;
  params.a0 = 1.0 / 3.0;
  params.a1 = 1.0 / 3.0;
  params.a2 = -1.0 / 3.0;
  params.a3 = 1.0 / 3.0;
  params.sigma = 1.0 / 3.0;
  params.hurst = {0.5, 0.75};
  params.horizon = 1.0;
  params.initial = parse_expression("1/3 + sqrt(3)*cos(x)/3");
  return params;
}

GridFunction random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  GridFunction u(n);
  for (int i = 0; i < n; ++i) u[i] = normal(engine);
  return u;
}

}  // namespace

TEST_CASE("cubic drift values") {
  const ModelParams params = example_params();
  CHECK(f_scalar(params, 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(f_scalar(params, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  ModelParams cube;
  cube.a0 = 1.0;
  CHECK(f_scalar(cube, -2.0) == -8.0);
}

TEST_CASE("drift vector") {
  ModelParams params = example_params();
  const GridFunction zero = GridFunction::Zero(5);
  CHECK((drift_vector(params, zero).array() == params.a3).all());

  const GridFunction u = random_vector(5, 3);
  const GridFunction f = drift_vector(params, u);
  for (int i = 0; i < 5; ++i) {
    CHECK(f[i] == f_scalar(params, u[i]));
  }

  params.drift_enabled = false;
  CHECK(drift_vector(params, u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("taming") {
  const Grid grid = build_grid(8);

  SUBCASE("tau = 0 leaves the drift untouched") {
    ModelParams params = example_params();
    TamedDrift untamed{params, 0.0};
    const GridFunction u = random_vector(8, 11);
    CHECK((tame(untamed, grid, u) - drift_vector(params, u)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("norm 3 with tau 1 divides by 4") {
    ModelParams cube;
    cube.a0 = 1.0;
    // Constant state c with |f(c)| sqrt(pi) = 3.
    const double c = std::cbrt(3.0 / std::sqrt(M_PI));
    const GridFunction u = GridFunction::Constant(8, c);
    const GridFunction f = drift_vector(cube, u);
    CHECK(lp_norm(grid, f, 2.0) == doctest::Approx(3.0).epsilon(1e-13));
    TamedDrift tamed{cube, 1.0};
    CHECK((tame(tamed, grid, u) - f / 4.0).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("tamed norm bounded by the drift norm and 1/tau") {
    const ModelParams params = example_params();
    for (double tau : {0.25, 0.01}) {
      TamedDrift tamed{params, tau};
      for (std::uint64_t s = 0; s < 10; ++s) {
        const GridFunction u = 3.0 * random_vector(8, 60 + s);
        const double tamed_norm = lp_norm(grid, tame(tamed, grid, u), 2.0);
        const double drift_norm = lp_norm(grid, drift_vector(params, u), 2.0);
        CHECK(tamed_norm <= std::min(drift_norm, 1.0 / tau) * (1 + 1e-14));
      }
    }
  }
}

TEST_CASE("initial data sampling") {
  const ModelParams params = example_params();
  CHECK(params.initial(M_PI / 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(params.initial(0.0) == doctest::Approx((1.0 + std::sqrt(3.0)) / 3.0).epsilon(1e-14));

  const Grid grid = build_grid(16);
  const GridFunction u0 = initial_grid(params, grid);
  for (int i = 0; i < 16; ++i) {
    CHECK(u0[i] == params.initial(grid.points[i]));
  }

  ModelParams constant = params;
  constant.initial = [](double) { return 2.5; };
  CHECK((initial_grid(constant, grid).array() == 2.5).all());
}

TEST_CASE("parameter validation") {
  ModelParams params = example_params();
  params.a0 = 0.0;
  CHECK_THROWS_AS(validate(params), std::invalid_argument);
  params.drift_enabled = false;
  CHECK_NOTHROW(validate(params));

  params = example_params();
  params.sigma = -1.0;
  CHECK_THROWS_AS(validate(params), std::invalid_argument);

  params = example_params();
  params.hurst.h1 = 0.4;
  CHECK_THROWS_AS(validate(params), std::invalid_argument);
  params.hurst.h1 = 1.0;
  CHECK_THROWS_AS(validate(params), std::invalid_argument);
}

TEST_CASE("local Lipschitz bound with the coefficient constant") {
  const ModelParams params = example_params();
  const double c_f = f_lipschitz_envelope_constant(params);
  std::mt19937_64 engine(17);
  std::uniform_real_distribution<double> uniform(-10.0, 10.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double x = uniform(engine);
    const double y = uniform(engine);
    const double lhs = std::abs(f_scalar(params, x) - f_scalar(params, y));
    CHECK(lhs <= c_f * (1.0 + x * x + y * y) * std::abs(x - y) * (1 + 1e-12));
  }
}

TEST_CASE("one-sided bound with the coefficient constant") {
  std::mt19937_64 engine(29);
  std::uniform_real_distribution<double> uniform(-10.0, 10.0);

  const ModelParams params = example_params();
  const double c1 = f_one_sided_constant(params);
  CHECK(c1 == doctest::Approx(1.0 / 9.0 / (3.0 / 3.0) + 1.0 / 3.0).epsilon(1e-12));
  for (int trial = 0; trial < 2000; ++trial) {
    const double x = uniform(engine);
    const double y = uniform(engine);
    const double lhs = (y - x) * (f_scalar(params, x) - f_scalar(params, y));
    CHECK(lhs <= c1 * (x - y) * (x - y) * (1 + 1e-12) + 1e-12);
  }

  // Monotone drift: the clamped constant is zero and the product never
  // becomes positive.
  ModelParams monotone;
  monotone.a0 = 2.0;
  monotone.a2 = 1.0;
  CHECK(f_one_sided_constant(monotone) == 0.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double x = uniform(engine);
    const double y = uniform(engine);
    CHECK((y - x) * (f_scalar(monotone, x) - f_scalar(monotone, y)) <= 1e-12);
  }
}

// Growth of the componentwise drift in the Sobolev scale: the corpus ratio
// |F(u)|_k / (1 + ||u||_k^3) must stay below an N-independent constant.
// Measured maximum on this corpus: 0.13 at N = 8, decreasing in N.
TEST_CASE("drift growth in seminorms stays uniformly bounded on the corpus") {
  const ModelParams params = example_params();
  for (int n : {8, 16, 32, 64}) {
    const Grid grid = build_grid(n);
    const SpectralBasis basis = make_spectral_basis(grid);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const GridFunction u = random_vector(n, 500 * n + s);
      const GridFunction f = drift_vector(params, u);
      for (int k : {1, 2, 3}) {
        const double norm_u = sobolev_norm(basis, u, k);
        worst = std::max(worst, seminorm(basis, f, k) / (1.0 + norm_u * norm_u * norm_u));
      }
    }
    CHECK(worst <= 0.5);
  }
}

TEST_CASE("expression language") {
  CHECK(parse_expression("2 + 3*4")(0.0) == 14.0);
  CHECK(parse_expression("(2 + 3)*4")(0.0) == 20.0);
  CHECK(parse_expression("2^3^2")(0.0) == 512.0);  // right associative
  CHECK(parse_expression("-x^2")(3.0) == -9.0);
  CHECK(parse_expression("cos(pi)")(0.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(parse_expression("sin(x)")(M_PI / 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(parse_expression("sqrt(9)")(0.0) == 3.0);
  CHECK(parse_expression("1/3+sqrt(3)*cos(x)/3")(0.0) ==
        doctest::Approx((1 + std::sqrt(3.0)) / 3).epsilon(1e-15));

  CHECK_THROWS_AS(parse_expression("2 +"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expression("foo(3)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expression("1 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expression("cos 3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expression(""), std::invalid_argument);
}
