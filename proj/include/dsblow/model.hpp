#pragma once

#include <string>

namespace dsblow {

/// Right-hand-side nonlinearity of the wave equation
///   u_tt - e^{-2Ht} Lap(u) = source.
enum class Nonlinearity { PowerU, PowerGrad, Linear };

std::string to_string(Nonlinearity k);
Nonlinearity nonlinearity_from_string(const std::string& s);

/// Equation and background parameters. The expansion rate `hubble` is the
/// primitive; the cosmological constant is derived as 3*H^2 on demand.
struct ModelParams {
  int n = 3;              // spatial dimension, n >= 2
  double hubble = 0.0;    // expansion rate H >= 0 (natural units, c = 1)
  double p = 2.0;         // nonlinearity exponent, p > 1
  Nonlinearity kind = Nonlinearity::PowerU;

  double lambda() const { return 3.0 * hubble * hubble; }
  void validate() const;  // throws std::domain_error on violation
};

/// Constants entering the ordinary differential blow-up criterion,
/// derived from the equation parameters.
///   a1: exponent of the lower growth bound G(t) >= K t^a1
///   b1: decay rate of the criterion weight e^{-b1 (t+R)}
///   A : criterion amplitude with the data-dependent constant normalized to 1
///       (NaN when outside the range where the formula is meaningful)
struct DerivedConstants {
  double a1 = 0.0;
  double b1 = 0.0;
  double A = 0.0;
};

/// Surface area of the unit sphere S^{n-1} embedded in R^n.
/// unit_sphere_area(1) = 2, unit_sphere_area(2) = 2*pi, unit_sphere_area(3) = 4*pi.
double unit_sphere_area(int n);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Positive root of (n-1) p^2 - (n+1) p - 2 = 0. Requires n >= 2.
double strauss_exponent(int n);

/// 1 + 2/(n-1). Requires n >= 2.
double glassey_exponent(int n);

/// Lifespan scaling exponent gamma for the |u|^p model:
///   T(eps) <= C eps^{-gamma},  gamma = (p-1) / ((p-1)[1 - (n-1)p/2] + 2).
/// Requires n >= 2 and 1 < p < strauss_exponent(n).
double lifespan_exponent_strauss(int n, double p);

/// Lifespan scaling exponent for the derivative-nonlinearity model: p - 1.
/// Requires p > 1.
double lifespan_exponent_glassey(double p);

/// Criterion hypothesis b1 - a1 (p-1) < 2. Requires p > 1.
bool kato_condition(double a1, double b1, double p);

/// Criterion constants for the given model. Throws for Nonlinearity::Linear
/// (there is no blow-up criterion to instantiate).
DerivedConstants derived_constants(const ModelParams& params);

/// Lower end of the amplitude window in which the lifespan bound applies:
///   2^{-((p-1) a1 - b1 + 2)/(p-1)}.
double epsilon_window_lower(double a1, double b1, double p);

}  // namespace dsblow
