#include "dsblow/odelab.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

#include "dsblow/special.hpp"

namespace dsblow {

namespace {

constexpr double kTiny = 1e-300;

double fit_zero_crossing(const std::deque<std::array<double, 2>>& pts, double fallback) {
  // Least-squares line w = a + b t through (t, w) points; returns the root
  // -a/b when the slope is negative, else the fallback.
  const std::size_t n = pts.size();
  if (n < 2) return fallback;
  double st = 0.0, sw = 0.0, stt = 0.0, stw = 0.0;
  for (const auto& q : pts) {
    st += q[0];
    sw += q[1];
    stt += q[0] * q[0];
    stw += q[0] * q[1];
  }
  const double denom = n * stt - st * st;
  if (denom <= 0.0) return fallback;
  const double slope = (n * stw - st * sw) / denom;
  const double intercept = (sw - slope * st) / n;
  if (!(slope < 0.0)) return fallback;
  return -intercept / slope;
}

}  // namespace

void KatoProblem::validate() const {
  if (!(A >= 0.0) || !std::isfinite(A))
    throw std::invalid_argument("KatoProblem: need amplitude A >= 0");
  if (!(R >= 0.0)) throw std::invalid_argument("KatoProblem: need shift R >= 0");
  if (!(p > 1.0)) throw std::invalid_argument("KatoProblem: need exponent p > 1");
  if (!(G0 > 0.0) || !(G0p > 0.0))
    throw std::invalid_argument("KatoProblem: need G(0) > 0 and G'(0) > 0");
  if (!std::isfinite(b1)) throw std::invalid_argument("KatoProblem: b1 must be finite");
}

OdeOutcome integrate_kato_ode(const KatoProblem& prob, const KatoControls& ctrl,
                              const std::function<double(double)>& extra_weight) {
  prob.validate();
  if (!(ctrl.T_max > 0.0) || !(ctrl.G_max > prob.G0))
    throw std::invalid_argument("integrate_kato_ode: need T_max > 0 and G_max > G(0)");

  auto source = [&](double t, double g) {
    double s = prob.A * std::exp(-prob.b1 * (t + prob.R)) * std::pow(std::abs(g), prob.p);
    if (extra_weight) s *= extra_weight(t);
    return s;
  };

  const double w_expo = -0.5 * (prob.p - 1.0);
  double t = 0.0, g = prob.G0, gp = prob.G0p;

  OdeOutcome out;
  std::deque<std::array<double, 2>> tail;  // trailing (t, G^{-(p-1)/2})
  std::size_t stride = 1, step_count = 0;
  auto record = [&]() {
    tail.push_back({t, std::pow(g, w_expo)});
    if (tail.size() > 16) tail.pop_front();
    if (step_count % stride == 0) {
      out.trajectory.push_back({t, g, gp});
      if (out.trajectory.size() >= 100000) {
        // halve the retained resolution, deterministically
        std::vector<std::array<double, 3>> kept;
        kept.reserve(out.trajectory.size() / 2 + 1);
        for (std::size_t i = 0; i < out.trajectory.size(); i += 2) kept.push_back(out.trajectory[i]);
        out.trajectory = std::move(kept);
        stride *= 2;
      }
    }
  };
  record();

  while (true) {
    if (g > ctrl.G_max) {
      out.status = RunStatus::BlewUp;
      out.T_star = fit_zero_crossing(tail, t);
      break;
    }
    if (!std::isfinite(g) || !std::isfinite(gp)) {
      out.status = RunStatus::NumericalFailure;
      break;
    }
    if (t >= ctrl.T_max) {
      out.status = RunStatus::SurvivedToTmax;
      break;
    }

    const double gpp = source(t, g);
    const double tau1 = g / std::max(std::abs(gp), kTiny);
    const double tau2 = std::abs(gp) / std::max(gpp, kTiny);
    const double tau3 = 1.0 / (1.0 + std::abs(prob.b1));
    double dt = ctrl.eta * std::min({tau1, tau2, tau3});
    dt = std::min({dt, ctrl.dt_init * (1.0 + t), ctrl.T_max - t});
    if (step_count == 0) dt = std::min(dt, ctrl.dt_init);
    if (dt < 1e-14 * std::max(1.0, t)) {
      out.status = RunStatus::NumericalFailure;  // step underflow short of G_max
      break;
    }

    // classical RK4 on (G, G')
    const double k1g = gp, k1p = source(t, g);
    const double k2g = gp + 0.5 * dt * k1p, k2p = source(t + 0.5 * dt, g + 0.5 * dt * k1g);
    const double k3g = gp + 0.5 * dt * k2p, k3p = source(t + 0.5 * dt, g + 0.5 * dt * k2g);
    const double k4g = gp + dt * k3p, k4p = source(t + dt, g + dt * k3g);
    g += dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    gp += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    t += dt;
    ++step_count;
    record();
  }

  out.t_end = t;
  out.G_end = g;
  out.Gp_end = gp;
  return out;
}

double RescaledProblem::coefficient(double tau) const {
  const double d = exponent_D;
  const double stretch = std::pow(epsilon, -(base.p - 1.0) / d);
  return std::pow(epsilon, -base.b1 * (base.p - 1.0) / d) *
         std::exp(-base.b1 * tau * (stretch - 1.0));
}

double RescaledProblem::coefficient_horizon() const {
  if (epsilon == 1.0 || base.b1 == 0.0) return std::numeric_limits<double>::infinity();
  const double d = exponent_D;
  const double stretch = std::pow(epsilon, -(base.p - 1.0) / d);
  return (base.p - 1.0) * std::log(1.0 / epsilon) / (d * (stretch - 1.0));
}

RescaledProblem rescale_problem(double epsilon, double a1, const KatoProblem& prob) {
  prob.validate();
  const double d = (prob.p - 1.0) * a1 - prob.b1 + 2.0;
  if (!(d > 0.0))
    throw std::invalid_argument("rescale_problem: need (p-1) a1 - b1 + 2 > 0");
  const double window_lo = std::pow(2.0, -d / (prob.p - 1.0));
  if (!(epsilon >= window_lo) || !(epsilon <= 1.0))
    throw std::invalid_argument("rescale_problem: epsilon outside [2^{-D/(p-1)}, 1]");

  RescaledProblem out;
  out.epsilon = epsilon;
  out.exponent_D = d;
  out.tau_scale = std::pow(epsilon, (prob.p - 1.0) / d);
  out.g_scale = std::pow(epsilon, (prob.b1 - 2.0) / d);
  out.base = prob;
  out.base.G0 = out.g_scale * prob.G0;
  out.base.G0p = out.g_scale / out.tau_scale * prob.G0p;
  return out;
}

double WeightFn::operator()(double t) const {
  return std::pow(t, alpha) * std::exp(beta * t);
}

void KatoHypothesis::validate(double R) const {
  if (!(p > 1.0)) throw std::invalid_argument("KatoHypothesis: need p > 1");
  if (!(delta > 0.0) || !(delta < 0.5 * (p - 1.0)))
    throw std::invalid_argument("KatoHypothesis: need delta in (0, (p-1)/2)");
  if (!(T0 >= R)) throw std::invalid_argument("KatoHypothesis: need T0 >= R");
  if (!(T1 > 0.0)) throw std::invalid_argument("KatoHypothesis: need T1 > 0");
  if (!(K0 > 0.0) || !(K > 0.0))
    throw std::invalid_argument("KatoHypothesis: need K > 0 and K0 > 0");
}

namespace {

// 15-point Gauss-Legendre panel integral, cached nodes.
double panel_integral(const std::function<double(double)>& f, double a, double b) {
  static const auto rule = [] {
    std::vector<double> x, w;
    quad::gauss_legendre(15, x, w);
    return std::pair{x, w};
  }();
  double acc = 0.0;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t k = 0; k < rule.first.size(); ++k)
    acc += rule.second[k] * f(mid + half * rule.first[k]);
  return half * acc;
}

}  // namespace

FeasibilityResult criterion_feasibility(const GeneralizedWeights& weights,
                                        const KatoHypothesis& hyp, double A, double R,
                                        double t_search_max) {
  hyp.validate(R);
  if (!(A > 0.0)) throw std::invalid_argument("criterion_feasibility: need A > 0");
  if (!(R >= 0.0)) throw std::invalid_argument("criterion_feasibility: need R >= 0");
  if (!weights.a.strictly_increasing() || !weights.b.strictly_increasing())
    throw std::invalid_argument(
        "criterion_feasibility: weights must be positive and strictly increasing");

  const double p = hyp.p;
  const double q_expo = 0.5 * (p - 1.0) - hyp.delta;
  const double start = 2.0 * hyp.T1;
  if (!(t_search_max > start))
    throw std::invalid_argument("criterion_feasibility: need t_search_max > 2*T1");

  auto integrand = [&](double s) {
    return std::pow(weights.b(s + R), -0.5) * std::pow(weights.a(s), q_expo);
  };

  // The combined weight must decrease strictly; checked on a sample grid.
  {
    const double span = std::max(10.0, start);
    double prev = integrand(std::max(start, 1e-8));
    for (int k = 1; k <= 256; ++k) {
      const double s = std::max(start, 1e-8) + span * k / 256.0;
      const double cur = integrand(s);
      if (!(cur < prev))
        throw std::invalid_argument(
            "criterion_feasibility: b^{-1/2}(t+R) a^{(p-1)/2-delta}(t) must be strictly "
            "decreasing");
      prev = cur;
    }
  }

  FeasibilityResult out;
  const double lhs = std::pow(hyp.delta, 2.0 / (p - 1.0)) *
                     std::pow(A / (p + 1.0), 1.0 / (p - 1.0)) / hyp.K0 *
                     std::pow(weights.a(start), 2.0 * hyp.delta / (p - 1.0));
  out.threshold = std::pow(lhs, 0.5 * (p - 1.0));  // I(t**) must reach this

  // march panels of slowly growing width, accumulating I
  double I = 0.0;
  double s = start;
  double width = std::max(1e-6 * std::max(1.0, start), 1e-9);
  std::optional<double> crossing;
  while (s < t_search_max) {
    const double s2 = std::min(s + width, t_search_max);
    const double inc = panel_integral(integrand, s, s2);
    if (!crossing && I + inc >= out.threshold) {
      // bisect inside the panel for the first time I reaches the threshold
      double lo = s, hi = s2;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (I + panel_integral(integrand, s, mid) >= out.threshold)
          hi = mid;
        else
          lo = mid;
      }
      crossing = 0.5 * (lo + hi);
    }
    I += inc;
    s = s2;
    width = std::min(width * 1.5, 0.05 * std::max(1.0, s));
  }
  out.I_at_search_max = I;
  out.t_star2 = crossing;

  // tail majorant: integrand = s^{mu} (1+R/s)^{-alpha_b/2} e^{lambda s} * const
  const double lambda = weights.a.beta * q_expo - 0.5 * weights.b.beta;
  const double mu = weights.a.alpha * q_expo - 0.5 * weights.b.alpha;
  if (lambda > 0.0 || (lambda == 0.0 && mu >= -1.0)) {
    out.I_inf_upper = std::numeric_limits<double>::infinity();
  } else if (lambda == 0.0) {
    // integrand <= s^mu for R >= 0 (alpha_b >= 0), mu < -1
    const double s0 = std::max({t_search_max, 1.0, start});
    out.I_inf_upper = I + std::pow(s0, mu + 1.0) / (-mu - 1.0);
  } else {
    // choose s0 so that d/ds log(integrand) <= lambda/2 beyond it
    double s0 = std::max({t_search_max, start, 1.0, 2.0 * (std::abs(mu) + 1.0) / (-lambda)});
    double extra = 0.0;
    double ss = t_search_max, w2 = width;
    while (ss < s0) {
      const double ss2 = std::min(ss + w2, s0);
      extra += panel_integral(integrand, ss, ss2);
      ss = ss2;
      w2 = std::min(w2 * 1.5, 0.05 * std::max(1.0, ss));
    }
    out.I_inf_upper = I + extra + integrand(s0) * 2.0 / (-lambda);
  }
  out.tail_unreachable = !crossing && out.threshold > out.I_inf_upper;
  return out;
}

std::vector<RegionCell> blowup_region_map(const RegionMapSpec& spec) {
  if (spec.p_values.empty() || spec.b1_values.empty())
    throw std::invalid_argument("blowup_region_map: empty parameter grid");
  const std::size_t np = spec.p_values.size();
  const std::size_t nb = spec.b1_values.size();
  std::vector<RegionCell> cells(np * nb);
#pragma omp parallel for schedule(dynamic)
  for (long idx = 0; idx < static_cast<long>(np * nb); ++idx) {
    const std::size_t i = static_cast<std::size_t>(idx) / nb;
    const std::size_t j = static_cast<std::size_t>(idx) % nb;
    RegionCell& cell = cells[static_cast<std::size_t>(idx)];
    cell.p = spec.p_values[i];
    cell.b1 = spec.b1_values[j];
    cell.T_star = std::numeric_limits<double>::quiet_NaN();
    try {
      KatoProblem prob{spec.A, cell.b1, spec.R, cell.p, spec.G0, spec.G0p};
      KatoControls ctrl;
      ctrl.T_max = spec.T_max;
      ctrl.G_max = spec.G_max;
      const OdeOutcome res = integrate_kato_ode(prob, ctrl);
      cell.status = res.status;
      if (res.status == RunStatus::BlewUp) cell.T_star = res.T_star;
    } catch (const std::exception&) {
      cell.status = RunStatus::NumericalFailure;
    }
  }
  return cells;
}

}  // namespace dsblow
