#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "dsblow/status.hpp"

namespace dsblow {

/// Instance of the criterion ODE
///   G'' = A e^{-b1 (t+R)} |G|^p,  G(0) = G0 > 0,  G'(0) = G0p > 0.
struct KatoProblem {
  double A = 1.0;    // amplitude, >= 0 (0 degenerates to free motion)
  double b1 = 0.0;   // decay rate
  double R = 0.0;    // time shift, >= 0
  double p = 2.0;    // exponent, > 1
  double G0 = 1.0;
  double G0p = 1.0;

  void validate() const;
};

struct KatoControls {
  double T_max = 1e3;
  double G_max = 1e12;
  double eta = 0.02;      // step fraction of the local timescale
  double dt_init = 1e-3;
};

struct OdeOutcome {
  RunStatus status = RunStatus::SurvivedToTmax;
  double T_star = 0.0;  // blow-up time estimate, defined for BlewUp
  double t_end = 0.0;
  double G_end = 0.0;
  double Gp_end = 0.0;
  std::vector<std::array<double, 3>> trajectory;  // sampled (t, G, G')
};

/// Integrates the criterion ODE with adaptive step control that tracks the
/// collapse timescale. BlewUp once G exceeds G_max, with T_star obtained by
/// extrapolating G^{-(p-1)/2} linearly to zero over the trailing steps.
/// `extra_weight`, when provided, multiplies the source (used for rescaled
/// problems whose coefficient is time dependent).
OdeOutcome integrate_kato_ode(const KatoProblem& prob, const KatoControls& ctrl = {},
                              const std::function<double(double)>& extra_weight = {});

/// Amplitude-rescaled problem in the stretched time tau = t * eps^{(p-1)/D},
/// D = (p-1) a1 - b1 + 2:
///   Gr(tau) = eps^{(b1-2)/D} G(tau eps^{-(p-1)/D}),
///   Gr''    = coefficient(tau) A e^{-b1 (tau+R)} |Gr|^p,
///   coefficient(tau) = eps^{-b1(p-1)/D} e^{-b1 tau (eps^{-(p-1)/D} - 1)}.
struct RescaledProblem {
  KatoProblem base;      // transformed initial data; A, b1, R, p unchanged
  double epsilon = 1.0;
  double exponent_D = 0.0;
  double tau_scale = 1.0;  // tau = tau_scale * t
  double g_scale = 1.0;    // Gr = g_scale * G

  double coefficient(double tau) const;
  /// Largest tau with coefficient(tau) >= 1 (infinity when eps = 1 or b1 = 0).
  double coefficient_horizon() const;
};

/// Requires eps in [2^{-D/(p-1)}, 1] and D > 0; throws std::invalid_argument
/// otherwise.
RescaledProblem rescale_problem(double epsilon, double a1, const KatoProblem& prob);

/// Weight from the catalog t^alpha e^{beta t}; positive and strictly
/// increasing on (0, inf) iff alpha >= 0, beta >= 0, alpha + beta > 0.
struct WeightFn {
  double alpha = 0.0;
  double beta = 0.0;

  double operator()(double t) const;
  bool strictly_increasing() const { return alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0; }
};

struct GeneralizedWeights {
  WeightFn a;  // growth weight in the lower bound G(t) >= K a(t)
  WeightFn b;  // decay weight in G'' >= A b(t+R)^{-1} |G|^p
};

/// Hypothesis constants of the generalized criterion.
struct KatoHypothesis {
  double K = 1.0;
  double a1 = 1.0;     // retained for the specialized a(t) = t^{a1} runs
  double T0 = 1.0;     // must satisfy T0 >= R
  double T1 = 1.0;
  double delta = 0.1;  // in (0, (p-1)/2)
  double K0 = 1.0;
  double p = 2.0;      // exponent the hypothesis refers to

  void validate(double R) const;
};

struct FeasibilityResult {
  std::optional<double> t_star2;  // smallest feasible time, > 2*T1
  double threshold = 0.0;         // required value of the accumulated integral
  double I_at_search_max = 0.0;
  double I_inf_upper = 0.0;       // upper bound on I(inf); inf when divergent
  bool tail_unreachable = false;  // threshold provably beyond I(inf)
};

/// Accumulates I(t) = int_{2 T1}^t b(s+R)^{-1/2} a(s)^{(p-1)/2 - delta} ds and
/// returns the smallest t** <= t_search_max at which
///   delta^{2/(p-1)} (A/(p+1))^{1/(p-1)} K0^{-1} a(2T1)^{2 delta/(p-1)}
///     <= I(t**)^{2/(p-1)},
/// or nullopt. When the weight tail is integrable, a closed-form majorant of
/// the remainder decides whether the threshold is reachable at all.
FeasibilityResult criterion_feasibility(const GeneralizedWeights& weights,
                                        const KatoHypothesis& hyp, double A, double R,
                                        double t_search_max);

struct RegionMapSpec {
  std::vector<double> p_values;
  std::vector<double> b1_values;
  double A = 1.0;
  double R = 0.0;
  double G0 = 1.0;
  double G0p = 1.0;
  double T_max = 50.0;
  double G_max = 1e12;
};

struct RegionCell {
  double p = 0.0;
  double b1 = 0.0;
  RunStatus status = RunStatus::SurvivedToTmax;
  double T_star = 0.0;  // NaN unless BlewUp
};

/// Classifies every (p, b1) cell by integrating the criterion ODE. Cells run
/// concurrently; results are ordered p-major, then b1. Per-cell failures are
/// recorded, never propagated.
std::vector<RegionCell> blowup_region_map(const RegionMapSpec& spec);

}  // namespace dsblow
