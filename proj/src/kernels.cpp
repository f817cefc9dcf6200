#include "dsblow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dsblow::kernels {

namespace {

constexpr std::size_t kChunk = 4096;

inline double source_term(double u, double v, double ur, const RhsSetup& s) {
  switch (s.kind) {
    case 1: return s.source_weight * std::pow(std::abs(u), s.p);
    case 2: return s.source_weight * (std::pow(std::abs(v), s.p) + std::pow(std::abs(ur), s.p));
    default: return 0.0;
  }
}

inline void rhs_node(std::size_t i, std::span<const double> u, std::span<const double> v,
                     std::span<double> dudt, std::span<double> dvdt, const RhsSetup& s,
                     double inv_2h) {
  const double ur = (u[i + 1] - u[i - 1]) * inv_2h;
  const double lap =
      s.lap->plus[i] * (u[i + 1] - u[i]) - s.lap->minus[i] * (u[i] - u[i - 1]);
  dudt[i] = v[i];
  dvdt[i] = s.wave_speed2 * lap + source_term(u[i], v[i], ur, s);
}

inline void rhs_boundaries(std::span<const double> u, std::span<const double> v,
                           std::span<double> dudt, std::span<double> dvdt,
                           const RhsSetup& s) {
  const std::size_t m = u.size();
  // r = 0: even symmetry; the flux form reduces to 2n (u_1 - u_0)/h^2
  const double lap0 = s.lap->plus[0] * (u[1] - u[0]);
  dudt[0] = v[0];
  dvdt[0] = s.wave_speed2 * lap0 + source_term(u[0], v[0], 0.0, s);
  dudt[m - 1] = 0.0;
  dvdt[m - 1] = 0.0;
}

}  // namespace

LaplacianCoeffs make_laplacian_coeffs(int n, double h, int m) {
  LaplacianCoeffs c;
  c.plus.resize(static_cast<std::size_t>(m), 0.0);
  c.minus.resize(static_cast<std::size_t>(m), 0.0);
  // shell volume of cell i divided by |S^{n-1}|: (r_{i+1/2}^n - r_{i-1/2}^n)/n
  auto half_r = [h](double i) { return i * h; };
  for (int i = 0; i + 1 < m; ++i) {
    const double r_lo = i == 0 ? 0.0 : half_r(i - 0.5);
    const double r_hi = half_r(i + 0.5);
    const double vol = (std::pow(r_hi, n) - std::pow(r_lo, n)) / n;
    c.plus[i] = std::pow(r_hi, n - 1) / (h * vol);
    c.minus[i] = i == 0 ? 0.0 : std::pow(r_lo, n - 1) / (h * vol);
  }
  return c;
}

void radial_rhs_serial(std::span<const double> u, std::span<const double> v,
                       std::span<double> dudt, std::span<double> dvdt, const RhsSetup& s) {
  const std::size_t m = u.size();
  const double inv_2h = 0.5 / s.h;
  rhs_boundaries(u, v, dudt, dvdt, s);
  for (std::size_t i = 1; i + 1 < m; ++i) rhs_node(i, u, v, dudt, dvdt, s, inv_2h);
}

void radial_rhs_parallel(std::span<const double> u, std::span<const double> v,
                         std::span<double> dudt, std::span<double> dvdt, const RhsSetup& s) {
  const std::size_t m = u.size();
  const double inv_2h = 0.5 / s.h;
  rhs_boundaries(u, v, dudt, dvdt, s);
  const long last = static_cast<long>(m) - 1;
#pragma omp parallel for schedule(static) if (m > 2048)
  for (long i = 1; i < last; ++i)
    rhs_node(static_cast<std::size_t>(i), u, v, dudt, dvdt, s, inv_2h);
}

double dot_serial(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double dot_chunked(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  if (nchunks <= 1) return dot_serial(a, b);
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < static_cast<long>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(lo + kChunk, n);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += a[i] * b[i];
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double total = 0.0;
  for (double x : partial) total += x;  // fixed order, independent of threads
  return total;
}

namespace {
inline MaxAbs max_abs_range(std::span<const double> a, std::size_t lo, std::size_t hi) {
  MaxAbs r;
  for (std::size_t i = lo; i < hi; ++i) {
    const double x = std::abs(a[i]);
    if (!std::isfinite(x)) {
      r.finite = false;
    } else if (x > r.value) {
      r.value = x;
    }
  }
  return r;
}
}  // namespace

MaxAbs max_abs_serial(std::span<const double> a) { return max_abs_range(a, 0, a.size()); }

MaxAbs max_abs_parallel(std::span<const double> a) {
  const std::size_t n = a.size();
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  if (nchunks <= 1) return max_abs_serial(a);
  std::vector<MaxAbs> partial(nchunks);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < static_cast<long>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(lo + kChunk, n);
    partial[static_cast<std::size_t>(c)] = max_abs_range(a, lo, hi);
  }
  MaxAbs r;
  for (const MaxAbs& x : partial) {
    r.finite = r.finite && x.finite;
    if (x.value > r.value) r.value = x.value;
  }
  return r;
}

double max_abs_from(std::span<const double> a, std::size_t i0) {
  double m = 0.0;
  for (std::size_t i = i0; i < a.size(); ++i) {
    const double x = std::abs(a[i]);
    if (x > m) m = x;
  }
  return m;
}

}  // namespace dsblow::kernels
