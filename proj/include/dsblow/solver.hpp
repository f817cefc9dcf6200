#pragma once

#include <span>
#include <vector>

#include "dsblow/grid.hpp"
#include "dsblow/model.hpp"
#include "dsblow/status.hpp"

namespace dsblow {

/// One diagnostics sample along a run. G and its derivatives are the volume
/// integrals of u, v and of the right-hand side of dv/dt (the exact
/// semi-discrete G''); G1 pairs u with the decaying eigenfunction weight and
/// is NaN when that weight is not configured. energy is the modified energy
/// 0.5 int (v^2 + e^{-2Ht} u_r^2) dV.
struct SeriesSample {
  double t = 0.0;
  double sup_u = 0.0;
  double G = 0.0;
  double Gp = 0.0;
  double Gpp = 0.0;
  double G1 = 0.0;
  double energy = 0.0;
  double lp_u = 0.0;
  double lp_v = 0.0;
};

/// Node values of phi1 together with the psi2 decay rate; lets the evolution
/// sample G1 without re-evaluating the angular quadrature.
struct G1Profile {
  std::vector<double> phi1;   // phi1(r_i)
  double decay_rate = 1.0;    // psi2(t, r) = e^{-decay_rate t} phi1(r)
};

struct EvolveControls {
  double T_max = 8.0;
  double U_max = 1e8;
  double sample_dt = 0.005;
  double cfl = 0.5;                    // dt = cfl * h; must stay <= 0.5
  double support_radius = 1.0;         // track |u| beyond r = support_radius + t + 3h; < 0 disables
  bool use_parallel_kernels = true;
};

struct BlowupReport {
  RunStatus status = RunStatus::SurvivedToTmax;
  double T_est = 0.0;        // blow-up time estimate; defined for BlewUp
  double t_end = 0.0;        // time reached
  double peak_sup = 0.0;     // max over the run of sup |u|
  double support_leak = 0.0; // max |u| seen outside the propagation cone
  std::vector<SeriesSample> series;
};

/// u_i = eps f(r_i), v_i = eps g(r_i). Validates the data spec.
WaveState make_initial_state(const InitialDataSpec& spec, const RadialGrid& grid);

/// Semi-discrete right-hand side: dudt = v,
/// dvdt = e^{-2Ht} Lap_h(u) + source(u, v, u_r, t).
void eval_rhs(std::span<const double> u, std::span<const double> v, double t,
              const RadialGrid& grid, const ModelParams& params, std::span<double> dudt,
              std::span<double> dvdt, bool parallel = true);

/// One classical RK4 step. Requires dt <= 0.5 h.
WaveState step(const WaveState& state, double dt, const RadialGrid& grid,
               const ModelParams& params);

/// Integrates from the given state until sup|u| > U_max (BlewUp),
/// t >= T_max (SurvivedToTmax) or loss of finiteness (NumericalFailure),
/// sampling diagnostics every sample_dt. On blow-up, T_est extrapolates
/// (sup|u|)^{-(p-1)} linearly to zero over the trailing samples.
BlowupReport evolve(const ModelParams& params, const RadialGrid& grid, WaveState initial,
                    const EvolveControls& controls, const G1Profile* g1 = nullptr);

/// Builds the initial state from the bump spec and validates that the grid
/// contains the propagation cone: r_max >= 1 + T_max.
BlowupReport evolve_until_blowup(const ModelParams& params, const InitialDataSpec& spec,
                                 const RadialGrid& grid, const EvolveControls& controls,
                                 const G1Profile* g1 = nullptr);

struct LifespanEstimate {
  double T = 0.0;
  double err = 0.0;  // Cauchy difference of the last two refinements
};

/// Finest-grid lifespan from a refinement sequence of reports; throws when
/// fewer than two reports or mixed statuses (blow-up not grid-converged).
LifespanEstimate lifespan_estimate(std::span<const BlowupReport> reports);

}  // namespace dsblow
