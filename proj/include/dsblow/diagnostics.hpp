#pragma once

#include <span>
#include <vector>

#include "dsblow/grid.hpp"
#include "dsblow/model.hpp"
#include "dsblow/solver.hpp"
#include "dsblow/special.hpp"

namespace dsblow {

/// Volume integral G = int u dV by composite trapezoid over the radial grid.
double functional_G(const WaveState& state, const RadialGrid& grid, int n,
                    bool parallel = true);

/// G1 = int psi2(t, r) u dV. Requires kind = PowerU and H > 0.
double functional_G1(const WaveState& state, const RadialGrid& grid,
                     const ModelParams& params, const TestFunctionContext& ctx);

/// phi1 sampled on the grid nodes plus the psi2 decay rate, for sampling G1
/// along an evolution.
G1Profile make_g1_profile(const RadialGrid& grid, const ModelParams& params,
                          const TestFunctionContext& ctx);

/// Pointwise ratios of the measured G'' against the differential-inequality
/// form it should dominate:
///   PowerU:    rho(t) = G''(t) / (e^{-n(p-1) t}   G(t)^p)
///   PowerGrad: rho(t) = G''(t) / (e^{-n(p-1) H t} |G'(t)|^p)
/// (Linear runs use the PowerU form and are reported as degenerate.)
/// inf_rho over the samples is the empirically measured criterion constant.
struct ResidualReport {
  std::vector<double> rho;    // NaN where G <= 0 made the ratio meaningless
  double inf_rho = 0.0;
  double sup_rho = 0.0;
  int g_nonpositive = 0;      // samples violating the positivity the setup assumes
  bool degenerate = false;    // linear run: ratios carry no information
};

ResidualReport inequality_residuals(std::span<const SeriesSample> series,
                                    const ModelParams& params);

/// Counts samples where the discrete second difference of G drops below
/// -tol, tol = 1e-8 max|G''|. Throws when fewer than 3 samples.
int convexity_violations(std::span<const SeriesSample> series);

/// Least-squares slope of log G against log(1+t) over samples with
/// t in [t_lo, t_hi] and G > 0.
double loglog_growth_slope(std::span<const SeriesSample> series, double t_lo, double t_hi);

}  // namespace dsblow
