#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel inner loops of the radial solver. Every kernel comes in a
// serial reference flavor and an OpenMP flavor. The parallel reductions use
// fixed-size chunking so results are bit-identical for any thread count.

namespace dsblow::kernels {

/// Flux-form coefficients of the radial Laplacian,
///   Lap_h(u)_i = lap_plus[i] (u_{i+1} - u_i) - lap_minus[i] (u_i - u_{i-1}),
/// a second-order centered discretization of u_rr + (n-1)/r u_r built from
/// half-cell fluxes over exact shell volumes. At the origin it reduces to
/// the even-symmetry form 2n (u_1 - u_0)/h^2. The flux form makes the
/// discrete operator self-adjoint, so the semi-discrete energy pairing is
/// exact.
struct LaplacianCoeffs {
  std::vector<double> plus;
  std::vector<double> minus;
};
LaplacianCoeffs make_laplacian_coeffs(int n, double h, int m);

/// Precomputed per-evaluation coefficients of the radial right-hand side.
struct RhsSetup {
  int n = 3;                  // spatial dimension
  double h = 0.0;             // grid spacing
  double wave_speed2 = 1.0;   // e^{-2Ht}
  double source_weight = 1.0; // e^{-n(p-1)Ht/2}
  double p = 2.0;
  int kind = 0;               // 0 = Linear, 1 = PowerU, 2 = PowerGrad
  const LaplacianCoeffs* lap = nullptr;
};

// du/dt = v, dv/dt = wave_speed2 * Lap_h(u) + source, clamped (zero) outer
// boundary node.
void radial_rhs_serial(std::span<const double> u, std::span<const double> v,
                       std::span<double> dudt, std::span<double> dvdt,
                       const RhsSetup& s);
void radial_rhs_parallel(std::span<const double> u, std::span<const double> v,
                         std::span<double> dudt, std::span<double> dvdt,
                         const RhsSetup& s);

double dot_serial(std::span<const double> a, std::span<const double> b);
/// Chunked dot product: deterministic for any thread count.
double dot_chunked(std::span<const double> a, std::span<const double> b);

struct MaxAbs {
  double value = 0.0;
  bool finite = true;
};

MaxAbs max_abs_serial(std::span<const double> a);
MaxAbs max_abs_parallel(std::span<const double> a);

/// max |a_i| over i in [i0, size); serial tail scan.
double max_abs_from(std::span<const double> a, std::size_t i0);

}  // namespace dsblow::kernels
