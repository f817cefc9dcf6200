#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dsblow/diagnostics.hpp"
#include "dsblow/solver.hpp"

using namespace dsblow;

namespace {

constexpr double kPi = std::numbers::pi;

BlowupReport reference_run(int m, double sample_dt = 0.005) {
  ModelParams params{3, 0.1, 2.0, Nonlinearity::PowerU};
  InitialDataSpec spec;
  EvolveControls controls;
  controls.T_max = 6.0;
  controls.sample_dt = sample_dt;
  const RadialGrid grid = RadialGrid::make(7.0 * (m - 1) / (m - 11.0), m);
  const TestFunctionContext ctx(3, 64, 2.0, 0.1);
  const G1Profile profile = make_g1_profile(grid, params, ctx);
  return evolve_until_blowup(params, spec, grid, controls, &profile);
}

}  // namespace

TEST_CASE("volume functional of the unit-ball indicator") {
  // grid ending exactly at r = 1 with u == 1 integrates to the ball volume
  const RadialGrid grid = RadialGrid::make(1.0, 4096);
  WaveState s;
  s.u.assign(grid.m, 1.0);
  s.v.assign(grid.m, 0.0);
  CHECK(functional_G(s, grid, 3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(2.5e-7));
  CHECK(std::abs(functional_G(s, grid, 3) - 4.0 * kPi / 3.0) < 1e-6);
}

TEST_CASE("volume functional is linear in the amplitude") {
  const RadialGrid grid = RadialGrid::make(2.0, 512);
  InitialDataSpec spec;
  spec.epsilon = 0.4;
  const WaveState s1 = make_initial_state(spec, grid);
  spec.epsilon = 0.8;
  const WaveState s2 = make_initial_state(spec, grid);
  CHECK(functional_G(s2, grid, 3) ==
        doctest::Approx(2.0 * functional_G(s1, grid, 3)).epsilon(1e-13));
}

TEST_CASE("volume functional converges at second order") {
  auto smooth = [](double r) { return std::exp(-3.0 * r * r) * (1.0 + 0.5 * r); };
  auto value_at = [&](int m) {
    const RadialGrid grid = RadialGrid::make(2.0, m);
    WaveState s;
    s.u.resize(grid.m);
    s.v.assign(grid.m, 0.0);
    for (int i = 0; i < grid.m; ++i) s.u[i] = smooth(grid.r(i));
    return functional_G(s, grid, 3);
  };
  const double coarse = value_at(512);
  const double fine = value_at(5120);  // 10x refinement as the reference
  const double finer = value_at(10240);
  const double err_coarse = std::abs(coarse - finer);
  const double err_fine = std::abs(fine - finer);
  CHECK(err_fine < err_coarse / 50.0);  // second order: 100x refinement gain, margin 2x
}

TEST_CASE("weighted functional G1 at t = 0 and on the zero state") {
  const RadialGrid grid = RadialGrid::make(2.0, 1024);
  ModelParams params{3, 0.5, 2.0, Nonlinearity::PowerU};
  const TestFunctionContext ctx(3, 64, 2.0, 0.5);
  InitialDataSpec spec;
  const WaveState s = make_initial_state(spec, grid);
  const double g1 = functional_G1(s, grid, params, ctx);
  CHECK(g1 > 0.0);

  WaveState zero;
  zero.u.assign(grid.m, 0.0);
  zero.v.assign(grid.m, 0.0);
  CHECK(functional_G1(zero, grid, params, ctx) == 0.0);

  ModelParams flat{3, 0.0, 2.0, Nonlinearity::PowerU};
  const TestFunctionContext flat_ctx(3, 64, 2.0, 0.0);
  CHECK_THROWS_AS(functional_G1(s, grid, flat, flat_ctx), std::domain_error);
  ModelParams grad{3, 0.5, 2.0, Nonlinearity::PowerGrad};
  CHECK_THROWS_AS(functional_G1(s, grid, grad, ctx), std::domain_error);
}

TEST_CASE("weighted functional agrees with a refined quadrature") {
  ModelParams params{3, 0.5, 2.0, Nonlinearity::PowerU};
  const TestFunctionContext ctx(3, 64, 2.0, 0.5);
  InitialDataSpec spec;
  auto value_at = [&](int m) {
    const RadialGrid grid = RadialGrid::make(2.0, m);
    const WaveState s = make_initial_state(spec, grid);
    return functional_G1(s, grid, params, ctx);
  };
  const double coarse = value_at(512);
  const double fine = value_at(4096);
  const double finer = value_at(8192);
  CHECK(std::abs(fine - finer) < std::abs(coarse - finer) / 30.0);
}

TEST_CASE("reference run: ratios positive, convex, weighted functional positive") {
  const BlowupReport report = reference_run(1024);
  REQUIRE(report.status == RunStatus::BlewUp);
  ModelParams params{3, 0.1, 2.0, Nonlinearity::PowerU};

  const ResidualReport res = inequality_residuals(report.series, params);
  CHECK(res.g_nonpositive == 0);
  CHECK_FALSE(res.degenerate);
  CHECK(res.inf_rho > 0.0);

  CHECK(convexity_violations(report.series) == 0);

  for (const SeriesSample& s : report.series) {
    CHECK(s.G > 0.0);
    CHECK(s.G1 > 0.0);
  }
  // G is nondecreasing sample to sample
  for (std::size_t i = 1; i < report.series.size(); ++i)
    CHECK(report.series[i].G >= report.series[i - 1].G * (1.0 - 1e-12));
}

TEST_CASE("measured criterion constant is stable under refinement") {
  ModelParams params{3, 0.1, 2.0, Nonlinearity::PowerU};
  const BlowupReport coarse = reference_run(1024);
  const BlowupReport fine = reference_run(2048);
  REQUIRE(coarse.status == RunStatus::BlewUp);
  REQUIRE(fine.status == RunStatus::BlewUp);
  const double inf_coarse = inequality_residuals(coarse.series, params).inf_rho;
  const double inf_fine = inequality_residuals(fine.series, params).inf_rho;
  CHECK(std::abs(inf_coarse - inf_fine) / inf_fine < 0.10);
}

TEST_CASE("pre-blow-up growth meets the predicted envelope exponent") {
  const BlowupReport report = reference_run(1024);
  REQUIRE(report.status == RunStatus::BlewUp);
  // a1 = (n-1)(1 - p/2) + 2 = 2 at n = 3, p = 2
  const double slope =
      loglog_growth_slope(report.series, 0.3 * report.t_end, 0.95 * report.t_end);
  CHECK(slope >= 2.0 - 0.2);
}

TEST_CASE("linear runs report degenerate near-zero ratios") {
  ModelParams params{3, 0.1, 2.0, Nonlinearity::Linear};
  InitialDataSpec spec;
  EvolveControls controls;
  controls.T_max = 1.5;
  const RadialGrid grid = RadialGrid::make(3.0, 512);
  const BlowupReport report = evolve_until_blowup(params, spec, grid, controls);
  REQUIRE(report.status == RunStatus::SurvivedToTmax);
  const ResidualReport res = inequality_residuals(report.series, params);
  CHECK(res.degenerate);
  CHECK(std::abs(res.inf_rho) < 1.0);  // no source: G'' is discretization residue only
  for (double rho : res.rho) CHECK(std::abs(rho) < 1.0);
}

TEST_CASE("derivative-model ratios use the velocity functional") {
  ModelParams params{3, 0.4, 1.5, Nonlinearity::PowerGrad};
  InitialDataSpec spec;
  EvolveControls controls;
  controls.T_max = 4.0;
  const RadialGrid grid = RadialGrid::make(5.0 * 1023.0 / 1013.0, 1024);
  const BlowupReport report = evolve_until_blowup(params, spec, grid, controls);
  const ResidualReport res = inequality_residuals(report.series, params);
  CHECK(res.inf_rho > 0.0);
  CHECK(convexity_violations(report.series) == 0);
}

TEST_CASE("convexity counter flags constructed counterexamples") {
  std::vector<SeriesSample> series(5);
  for (int i = 0; i < 5; ++i) {
    series[i].t = i;
    series[i].G = i * i;  // convex
    series[i].Gpp = 2.0;
  }
  CHECK(convexity_violations(series) == 0);

  for (int i = 0; i < 5; ++i) series[i].G = -series[i].t * series[i].t;  // concave
  CHECK(convexity_violations(series) > 0);

  for (int i = 0; i < 5; ++i) series[i].G = 3.0;  // constant
  CHECK(convexity_violations(series) == 0);

  std::vector<SeriesSample> short_series(2);
  CHECK_THROWS_AS(convexity_violations(short_series), std::invalid_argument);
}
