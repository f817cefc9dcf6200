#pragma once

#include <vector>

namespace dsblow {

/// Uniform radial grid r_i = i h, i = 0..m-1, h = r_max/(m-1).
struct RadialGrid {
  double r_max = 0.0;
  int m = 0;
  double h = 0.0;

  static RadialGrid make(double r_max, int m);  // validates m >= 128, r_max > 0
  double r(int i) const { return h * i; }

  /// Quadrature measure per node: |S^{n-1}| w_i r_i^{n-1} h with composite
  /// trapezoid weights w_i, so that sum(measure * u) approximates the
  /// volume integral of a radial function.
  std::vector<double> node_measure(int n) const;
};

/// Bump-profile initial data u(0) = eps f, u_t(0) = eps g with
/// f(r) = (1 - r^2)_+^{k_f}, g(r) = (1 - r^2)_+^{k_g}, supported in r <= 1.
struct InitialDataSpec {
  double epsilon = 1.0;  // in [0, 1]; 0 gives the zero state
  int k_f = 8;
  int k_g = 8;
  bool f_on = true;
  bool g_on = true;

  void validate() const;
  double f(double r) const;
  double g(double r) const;

  /// True when the data meet the sign/support conditions the lifespan
  /// statements assume (nonnegative, supported in the unit ball, velocity
  /// not identically zero).
  bool theorem_data() const { return epsilon > 0.0 && g_on; }
};

/// Field snapshot: u and v = du/dt on the grid nodes at time t.
struct WaveState {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;
};

}  // namespace dsblow
