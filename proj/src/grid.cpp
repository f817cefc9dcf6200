#include "dsblow/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "dsblow/model.hpp"

namespace dsblow {

RadialGrid RadialGrid::make(double r_max, int m) {
  if (m < 128) throw std::invalid_argument("RadialGrid: need m >= 128");
  if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: need r_max > 0");
  RadialGrid g;
  g.r_max = r_max;
  g.m = m;
  g.h = r_max / (m - 1);
  return g;
}

std::vector<double> RadialGrid::node_measure(int n) const {
  const double area = unit_sphere_area(n);
  std::vector<double> w(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double trap = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    w[static_cast<std::size_t>(i)] =
        area * trap * std::pow(r(i), static_cast<double>(n - 1)) * h;
  }
  return w;
}

void InitialDataSpec::validate() const {
  if (!(epsilon >= 0.0) || !(epsilon <= 1.0))
    throw std::invalid_argument("InitialDataSpec: need amplitude in [0, 1]");
  if (k_f < 4 || k_g < 4)
    throw std::invalid_argument("InitialDataSpec: need bump orders k_f, k_g >= 4");
}

double InitialDataSpec::f(double r) const {
  if (!f_on || r >= 1.0) return 0.0;
  return std::pow(1.0 - r * r, k_f);
}

double InitialDataSpec::g(double r) const {
  if (!g_on || r >= 1.0) return 0.0;
  return std::pow(1.0 - r * r, k_g);
}

}  // namespace dsblow
