#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dsblow/model.hpp"
#include "dsblow/special.hpp"

using namespace dsblow;

namespace {

constexpr double kPi = std::numbers::pi;

// independent series oracle for the n = 2 angular integral:
// int_0^{2pi} e^{r cos a} da = 2 pi sum_k (r/2)^{2k} / (k!)^2
double bessel_i0_series(double r) {
  double term = 1.0, sum = 1.0;
  const double q = 0.25 * r * r;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double phi1_closed_n3(double r) { return 4.0 * kPi * std::sinh(r) / r; }

}  // namespace

TEST_CASE("phi1 at the origin is the sphere area") {
  for (int n : {2, 3, 4, 5}) {
    TestFunctionContext ctx(n);
    CHECK(ctx.phi1(0.0) == doctest::Approx(unit_sphere_area(n)).epsilon(1e-14));
  }
}

TEST_CASE("phi1 matches the closed form in three dimensions") {
  TestFunctionContext ctx(3);
  CHECK(ctx.phi1(1.0) == doctest::Approx(4.0 * kPi * std::sinh(1.0)).epsilon(1e-12));
  double worst = 0.0;
  for (double r = 0.01; r <= 100.0; r *= 1.2) {
    const double expected = phi1_closed_n3(r) * std::exp(-r);
    worst = std::max(worst, std::abs(ctx.phi1_scaled(r) - expected) / expected);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("phi1 matches the series oracle in two dimensions") {
  TestFunctionContext ctx(2);
  const double expected = 2.0 * kPi * bessel_i0_series(2.0);
  CHECK(ctx.phi1(2.0) == doctest::Approx(expected).epsilon(1e-12));
  for (double r : {0.1, 1.0, 5.0, 20.0}) {
    const double series = 2.0 * kPi * bessel_i0_series(r) * std::exp(-r);
    CHECK(ctx.phi1_scaled(r) == doctest::Approx(series).epsilon(1e-11));
  }
}

TEST_CASE("phi1 is positive and strictly increasing") {
  for (int n : {2, 3, 4}) {
    TestFunctionContext ctx(n);
    double prev = ctx.phi1_scaled(0.0) * std::exp(0.0);
    CHECK(prev > 0.0);
    for (int k = 1; k <= 400; ++k) {
      const double r = 0.05 * k;
      const double cur = std::exp(r) * ctx.phi1_scaled(r);
      CHECK(cur > 0.0);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("quadrature order gate: doubling q is converged") {
  TestFunctionContext coarse(3, 16);
  TestFunctionContext fine(3, 32);
  for (double r = 0.5; r <= 50.0; r *= 1.7) {
    const double a = coarse.phi1_scaled(r);
    const double b = fine.phi1_scaled(r);
    CHECK(std::abs(a - b) < 1e-10 * std::abs(b));
  }
  CHECK_THROWS_AS(TestFunctionContext(3, 8), std::domain_error);
}

TEST_CASE("phi1 overflow is reported, scaled form is not") {
  TestFunctionContext ctx(3);
  CHECK_THROWS_AS(ctx.phi1(701.0), std::overflow_error);
  CHECK(ctx.phi1_scaled(2000.0) > 0.0);
}

TEST_CASE("psi1 and psi2 compose phi1 with time decay") {
  TestFunctionContext ctx(3, 64, 2.0, 2.0 / 3.0);
  // psi1(0, r) = phi1(r)
  CHECK(ctx.psi1(0.0, 1.3) == doctest::Approx(ctx.phi1(1.3)).epsilon(1e-14));
  // psi1(t, 0) = 4 pi e^{-t}
  CHECK(ctx.psi1(2.0, 0.0) == doctest::Approx(4.0 * kPi * std::exp(-2.0)).epsilon(1e-13));
  // n = 3, p = 2, H = 2/3 puts the extra decay at 1/2: psi2(1, 0) = 4 pi e^{-1.5}
  CHECK(ctx.psi2_decay_rate() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(ctx.psi2(1.0, 0.0) == doctest::Approx(4.0 * kPi * std::exp(-1.5)).epsilon(1e-13));
  CHECK(ctx.psi2(1.0, 0.7) > 0.0);

  TestFunctionContext flat(3, 64, 2.0, 0.0);
  CHECK_THROWS_AS(flat.psi2(1.0, 0.0), std::domain_error);
}

TEST_CASE("eigenfunction defect is small and second order") {
  TestFunctionContext ctx(3);
  const EigenResidual res = verify_eigenfunction(0.5, 10.0, 1e-3, ctx);
  CHECK(res.residual < 1e-4);
  CHECK_FALSE(res.coarse_grid_warning);

  const EigenResidual coarse = verify_eigenfunction(0.5, 10.0, 2e-3, ctx);
  const double ratio = coarse.residual / res.residual;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);

  const EigenResidual warn = verify_eigenfunction(0.5, 10.0, 0.2, ctx);
  CHECK(warn.coarse_grid_warning);
}

TEST_CASE("eigenfunction defect of a constant field is one") {
  const EigenResidual res =
      eigenfunction_residual([](double) { return 1.0; }, 0.5, 10.0, 1e-2, 3);
  CHECK(res.residual == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cone integral against a brute-force Riemann oracle") {
  TestFunctionContext ctx(3, 64, 2.0);
  // t = 0, n = 3, p = 2: 4 pi int_0^1 (4 pi sinh r / r)^2 r^2 dr
  const std::size_t nodes = 1000000;
  double riemann = 0.0;
  const double dr = 1.0 / nodes;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double r = (k + 0.5) * dr;
    const double psi = phi1_closed_n3(r);
    riemann += psi * psi * r * r * dr;
  }
  riemann *= 4.0 * kPi;
  CHECK(psi1_cone_integral(0.0, ctx) == doctest::Approx(riemann).epsilon(1e-6));
}

TEST_CASE("cone integral stays bounded by the decay envelope") {
  struct Case {
    int n;
    double p;
  };
  for (const Case c : {Case{3, 2.0}, Case{2, 1.5}}) {
    TestFunctionContext ctx(c.n, 64, c.p);
    const double decay = c.n - 1 - 0.5 * (c.n - 1) * c.p / (c.p - 1.0);
    double worst = 0.0;
    for (double t = 0.0; t <= 50.0; t += 2.0) {
      const double ratio = psi1_cone_integral(t, ctx) / std::pow(1.0 + t, decay);
      CHECK(std::isfinite(ratio));
      worst = std::max(worst, ratio);
    }
    CHECK(worst > 0.0);
    // envelope constant measured once the ratio has settled; generous margin
    CHECK(worst < 1e4);
  }
}

TEST_CASE("cone integral shrinks with the support radius") {
  TestFunctionContext ctx(3, 64, 2.0);
  // integrating to t + 0.5 instead of t + 1 must give strictly less
  const double t = 2.0;
  const double full = psi1_cone_integral(t, ctx);
  const double expo = ctx.p() / (ctx.p() - 1.0);
  auto integrand = [&](double r) {
    const double psi = std::exp(r - t) * ctx.phi1_scaled(r);
    return std::pow(psi, expo) * r * r;
  };
  const double partial =
      unit_sphere_area(3) * quad::adaptive_simpson(integrand, 0.0, t + 0.5, 1e-11);
  CHECK(partial < full);
  CHECK(partial > 0.0);
}

TEST_CASE("asymptotic constant approaches the known limits") {
  TestFunctionContext ctx3(3);
  CHECK(asymptotic_constant(30.0, ctx3) == doctest::Approx(2.0 * kPi).epsilon(1e-8));
  const double c20 = asymptotic_constant(20.0, ctx3);
  const double c40 = asymptotic_constant(40.0, ctx3);
  CHECK(std::abs(c40 - c20) / c40 < 0.01);

  TestFunctionContext ctx2(2);
  CHECK(asymptotic_constant(200.0, ctx2) ==
        doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-3));
  CHECK_THROWS_AS(asymptotic_constant(0.0, ctx2), std::domain_error);
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
  std::vector<double> x, w;
  quad::gauss_legendre(8, x, w);
  double mass = 0.0, p14 = 0.0;
  for (int k = 0; k < 8; ++k) {
    mass += w[k];
    p14 += w[k] * std::pow(x[k], 14);
  }
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));  // int x^14 = 2/15
}
