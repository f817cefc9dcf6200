#include "dsblow/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dsblow/model.hpp"

namespace dsblow {

namespace quad {

void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  if (q < 1) throw std::domain_error("gauss_legendre: need q >= 1");
  nodes.assign(q, 0.0);
  weights.assign(q, 0.0);
  const int mid = (q + 1) / 2;
  for (int i = 0; i < mid; ++i) {
    // Chebyshev-based initial guess, then Newton on P_q(z) = 0.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= q; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = q * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    nodes[i] = -z;
    nodes[q - 1 - i] = z;
    weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[q - 1 - i] = weights[i];
  }
}

namespace {

double simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa,
                       double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || depth > 48) {
    if (depth > 48 && std::abs(delta) > 15.0 * tol)
      throw std::runtime_error("adaptive_simpson: refinement limit hit, local error " +
                               std::to_string(std::abs(delta)));
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace quad

TestFunctionContext::TestFunctionContext(int n, int q, double p, double hubble)
    : n_(n), q_(q), p_(p), hubble_(hubble) {
  if (n < 2) throw std::domain_error("TestFunctionContext: need n >= 2");
  if (q < 16) throw std::domain_error("TestFunctionContext: need quadrature order q >= 16");
  if (q > 4096) throw std::domain_error("TestFunctionContext: quadrature order too large");
  if (!(p > 1.0)) throw std::domain_error("TestFunctionContext: need p > 1");
  if (!(hubble >= 0.0)) throw std::domain_error("TestFunctionContext: need H >= 0");

  const double area = unit_sphere_area(n - 1);  // |S^{n-2}|, = 2 for n = 2
  std::vector<double> x, w;
  for (int order = q; order <= 8192; order *= 2) {
    quad::gauss_legendre(order, x, w);
    Rule rule;
    rule.cos_m1.resize(order);
    rule.weight.resize(order);
    for (int k = 0; k < order; ++k) {
      const double theta = 0.5 * std::numbers::pi * (x[k] + 1.0);
      rule.cos_m1[k] = std::cos(theta) - 1.0;
      rule.weight[k] = area * 0.5 * std::numbers::pi * w[k] *
                       std::pow(std::sin(theta), static_cast<double>(n - 2));
    }
    ladder_.push_back(std::move(rule));
    if (order >= 4096) break;
  }
}

double TestFunctionContext::phi1_scaled(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("phi1: need r >= 0");
  if (r == 0.0) return unit_sphere_area(n_);  // analytic limit, integrand == 1
  auto eval = [&](const Rule& rule) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.weight.size(); ++k)
      acc += rule.weight[k] * std::exp(r * rule.cos_m1[k]);
    return acc;
  };
  double prev = eval(ladder_.front());
  for (std::size_t j = 1; j < ladder_.size(); ++j) {
    const double next = eval(ladder_[j]);
    if (std::abs(next - prev) <= 1e-13 * std::abs(next)) return next;
    prev = next;
  }
  // The top rung pair must agree; integrand is entire so this indicates
  // an out-of-design argument.
  throw std::runtime_error("phi1: angular quadrature did not converge at r = " +
                           std::to_string(r));
}

double TestFunctionContext::phi1(double r) const {
  if (r > 700.0)
    throw std::overflow_error("phi1: e^r overflows for r > 700; use phi1_scaled");
  return std::exp(r) * phi1_scaled(r);
}

double TestFunctionContext::psi1(double t, double r) const {
  if (!(t >= 0.0)) throw std::domain_error("psi1: need t >= 0");
  // e^{-t} phi1(r) = e^{r-t} phi1_scaled(r)
  return std::exp(r - t) * phi1_scaled(r);
}

double TestFunctionContext::psi2_decay_rate() const {
  return 0.5 * n_ * (p_ - 1.0) * hubble_ / p_ + 1.0;
}

double TestFunctionContext::psi2(double t, double r) const {
  if (!(hubble_ > 0.0))
    throw std::domain_error("psi2: defined only for H > 0");
  if (!(t >= 0.0)) throw std::domain_error("psi2: need t >= 0");
  return std::exp(r - psi2_decay_rate() * t) * phi1_scaled(r);
}

EigenResidual eigenfunction_residual(const std::function<double(double)>& f, double r_lo,
                                     double r_hi, double h, int n) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo) || !(h > 0.0))
    throw std::domain_error("eigenfunction_residual: need 0 < r_lo < r_hi and h > 0");
  const auto count = static_cast<std::size_t>(std::floor((r_hi - r_lo) / h + 1e-9)) + 1;
  if (count < 3) throw std::domain_error("eigenfunction_residual: grid too small");
  std::vector<double> val(count);
  double scale = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    val[i] = f(r_lo + static_cast<double>(i) * h);
    scale = std::max(scale, std::abs(val[i]));
  }
  if (scale == 0.0) scale = 1.0;
  const double inv_h2 = 1.0 / (h * h);
  const double inv_2h = 0.5 / h;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double r = r_lo + static_cast<double>(i) * h;
    const double second = (val[i + 1] - 2.0 * val[i] + val[i - 1]) * inv_h2;
    const double first = (val[i + 1] - val[i - 1]) * inv_2h;
    worst = std::max(worst, std::abs(second + (n - 1) / r * first - val[i]));
  }
  return {worst / scale, h > 0.1};
}

EigenResidual verify_eigenfunction(double r_lo, double r_hi, double h,
                                   const TestFunctionContext& ctx) {
  return eigenfunction_residual([&ctx](double r) { return ctx.phi1(r); }, r_lo, r_hi, h,
                                ctx.n());
}

double psi1_cone_integral(double t, const TestFunctionContext& ctx) {
  if (!(t >= 0.0)) throw std::domain_error("psi1_cone_integral: need t >= 0");
  const double expo = ctx.p() / (ctx.p() - 1.0);
  const int n = ctx.n();
  // psi1(t,r) = e^{r-t} phi1_scaled(r) with r - t <= 1 on the cone, so the
  // integrand stays in range for every t.
  auto integrand = [&](double r) {
    const double psi = std::exp(r - t) * ctx.phi1_scaled(r);
    return std::pow(psi, expo) * std::pow(r, static_cast<double>(n - 1));
  };
  return unit_sphere_area(n) * quad::adaptive_simpson(integrand, 0.0, t + 1.0, 1e-11);
}

double asymptotic_constant(double r, const TestFunctionContext& ctx) {
  if (!(r > 0.0)) throw std::domain_error("asymptotic_constant: need r > 0");
  return ctx.phi1_scaled(r) * std::pow(r, 0.5 * (ctx.n() - 1));
}

}  // namespace dsblow
