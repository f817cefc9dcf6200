#include "dsblow/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dsblow {

std::string to_string(Nonlinearity k) {
  switch (k) {
    case Nonlinearity::PowerU: return "PowerU";
    case Nonlinearity::PowerGrad: return "PowerGrad";
    case Nonlinearity::Linear: return "Linear";
  }
  return "Unknown";
}

Nonlinearity nonlinearity_from_string(const std::string& s) {
  if (s == "PowerU") return Nonlinearity::PowerU;
  if (s == "PowerGrad") return Nonlinearity::PowerGrad;
  if (s == "Linear") return Nonlinearity::Linear;
  throw std::invalid_argument("unknown nonlinearity kind: " + s);
}

void ModelParams::validate() const {
  if (n < 2) throw std::domain_error("ModelParams: spatial dimension must satisfy n >= 2");
  if (!(p > 1.0)) throw std::domain_error("ModelParams: exponent must satisfy p > 1");
  if (!(hubble >= 0.0) || !std::isfinite(hubble))
    throw std::domain_error("ModelParams: expansion rate must satisfy H >= 0");
}

double unit_sphere_area(int n) {
  if (n < 1) throw std::domain_error("unit_sphere_area: need n >= 1");
  const double half_n = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half_n) / std::tgamma(half_n);
}

double unit_ball_volume(int n) {
  if (n < 1) throw std::domain_error("unit_ball_volume: need n >= 1");
  return unit_sphere_area(n) / n;
}

double strauss_exponent(int n) {
  if (n < 2) throw std::domain_error("strauss_exponent: need n >= 2");
  // Positive root of (n-1) p^2 - (n+1) p - 2 = 0. Both terms of the
  // numerator are positive, so this form is cancellation-free.
  const double b = static_cast<double>(n) + 1.0;
  const double a = static_cast<double>(n) - 1.0;
  return (b + std::sqrt(b * b + 8.0 * a)) / (2.0 * a);
}

double glassey_exponent(int n) {
  if (n < 2) throw std::domain_error("glassey_exponent: need n >= 2");
  return 1.0 + 2.0 / (static_cast<double>(n) - 1.0);
}

double lifespan_exponent_strauss(int n, double p) {
  if (n < 2) throw std::domain_error("lifespan_exponent_strauss: need n >= 2");
  if (!(p > 1.0) || !(p < strauss_exponent(n)))
    throw std::domain_error("lifespan_exponent_strauss: need 1 < p < strauss_exponent(n)");
  const double denom = (p - 1.0) * (1.0 - 0.5 * (n - 1) * p) + 2.0;
  // denom > 0 exactly on the subcritical range checked above
  return (p - 1.0) / denom;
}

double lifespan_exponent_glassey(double p) {
  if (!(p > 1.0)) throw std::domain_error("lifespan_exponent_glassey: need p > 1");
  return p - 1.0;
}

bool kato_condition(double a1, double b1, double p) {
  if (!(p > 1.0)) throw std::domain_error("kato_condition: need p > 1");
  return b1 - a1 * (p - 1.0) < 2.0;
}

DerivedConstants derived_constants(const ModelParams& params) {
  params.validate();
  const double n = params.n;
  const double p = params.p;
  const double h = params.hubble;
  const double np1 = n * (p - 1.0);
  DerivedConstants out;
  switch (params.kind) {
    case Nonlinearity::PowerU:
      out.a1 = (n - 1.0) * (1.0 - 0.5 * p) + 2.0;
      out.b1 = np1;
      // e^{-1} vol(B^n) [e (1 - H/2)]^{n(p-1)}; NaN for H >= 2 where the
      // underlying estimate has no content.
      out.A = std::exp(-1.0) * unit_ball_volume(params.n) *
              std::pow(std::numbers::e * (1.0 - 0.5 * h), np1);
      if (h >= 2.0) out.A = std::numeric_limits<double>::quiet_NaN();
      break;
    case Nonlinearity::PowerGrad: {
      out.a1 = 0.5 * n * h;
      out.b1 = 0.5 * np1 * h + 1.0;
      const double cprime = std::exp(-1.0) * unit_ball_volume(params.n) *
                            std::pow(0.5 * std::numbers::e * h, np1);
      out.A = cprime / (n * n) * std::pow(2.0 * std::numbers::e, 0.5 * h * n);
      break;
    }
    case Nonlinearity::Linear:
      throw std::domain_error("derived_constants: no criterion constants for the linear model");
  }
  return out;
}

double epsilon_window_lower(double a1, double b1, double p) {
  if (!(p > 1.0)) throw std::domain_error("epsilon_window_lower: need p > 1");
  const double d = (p - 1.0) * a1 - b1 + 2.0;
  return std::pow(2.0, -d / (p - 1.0));
}

}  // namespace dsblow
