#include "dsblow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsblow/kernels.hpp"

namespace dsblow {

namespace {

kernels::RhsSetup make_setup(double t, const RadialGrid& grid, const ModelParams& params,
                             const kernels::LaplacianCoeffs& lap) {
  kernels::RhsSetup s;
  s.n = params.n;
  s.h = grid.h;
  s.p = params.p;
  const double np1 = params.n * (params.p - 1.0);
  s.wave_speed2 = std::exp(-2.0 * params.hubble * t);
  s.source_weight = std::exp(-0.5 * np1 * params.hubble * t);
  switch (params.kind) {
    case Nonlinearity::Linear: s.kind = 0; break;
    case Nonlinearity::PowerU: s.kind = 1; break;
    case Nonlinearity::PowerGrad: s.kind = 2; break;
  }
  s.lap = &lap;
  return s;
}

double fit_blowup_time(std::span<const SeriesSample> series, double p, double fallback) {
  // Linear extrapolation of W = (sup|u|)^{-(p-1)} to zero over the last
  // ten samples.
  const std::size_t count = std::min<std::size_t>(series.size(), 10);
  if (count < 2) return fallback;
  const std::size_t first = series.size() - count;
  double st = 0.0, sw = 0.0, stt = 0.0, stw = 0.0;
  for (std::size_t i = first; i < series.size(); ++i) {
    const double t = series[i].t;
    const double w = std::pow(series[i].sup_u, -(p - 1.0));
    st += t;
    sw += w;
    stt += t * t;
    stw += t * w;
  }
  const double denom = count * stt - st * st;
  if (denom <= 0.0) return fallback;
  const double slope = (count * stw - st * sw) / denom;
  if (!(slope < 0.0)) return fallback;
  const double intercept = (sw - slope * st) / count;
  return -intercept / slope;
}

}  // namespace

WaveState make_initial_state(const InitialDataSpec& spec, const RadialGrid& grid) {
  spec.validate();
  WaveState state;
  state.t = 0.0;
  state.u.resize(static_cast<std::size_t>(grid.m));
  state.v.resize(static_cast<std::size_t>(grid.m));
  for (int i = 0; i < grid.m; ++i) {
    const double r = grid.r(i);
    state.u[static_cast<std::size_t>(i)] = spec.epsilon * spec.f(r);
    state.v[static_cast<std::size_t>(i)] = spec.epsilon * spec.g(r);
  }
  return state;
}

void eval_rhs(std::span<const double> u, std::span<const double> v, double t,
              const RadialGrid& grid, const ModelParams& params, std::span<double> dudt,
              std::span<double> dvdt, bool parallel) {
  const kernels::LaplacianCoeffs lap =
      kernels::make_laplacian_coeffs(params.n, grid.h, grid.m);
  const kernels::RhsSetup s = make_setup(t, grid, params, lap);
  if (parallel)
    kernels::radial_rhs_parallel(u, v, dudt, dvdt, s);
  else
    kernels::radial_rhs_serial(u, v, dudt, dvdt, s);
}

namespace {

/// RK4 stage storage and grid coefficients reused across steps.
struct Workspace {
  std::vector<double> k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v, tu, tv;
  std::vector<double> scratch;
  kernels::LaplacianCoeffs lap;
  std::vector<double> cell_volume;   // |S^{n-1}| (r_{i+1/2}^n - r_{i-1/2}^n)/n
  std::vector<double> face_measure;  // |S^{n-1}| r_{i+1/2}^{n-1} h for half cells

  Workspace(const RadialGrid& grid, int n)
      : k1u(grid.m), k1v(grid.m), k2u(grid.m), k2v(grid.m), k3u(grid.m), k3v(grid.m),
        k4u(grid.m), k4v(grid.m), tu(grid.m), tv(grid.m), scratch(grid.m),
        lap(kernels::make_laplacian_coeffs(n, grid.h, grid.m)) {
    const double area = unit_sphere_area(n);
    const double h = grid.h;
    cell_volume.resize(grid.m, 0.0);
    face_measure.resize(grid.m, 0.0);
    for (int i = 0; i < grid.m; ++i) {
      const double r_lo = i == 0 ? 0.0 : (i - 0.5) * h;
      const double r_hi = i + 1 == grid.m ? grid.r_max : (i + 0.5) * h;
      cell_volume[i] = area * (std::pow(r_hi, n) - std::pow(r_lo, n)) / n;
      if (i + 1 < grid.m) face_measure[i] = area * std::pow((i + 0.5) * h, n - 1) * h;
    }
  }

  /// 0.5 int (v^2 + e^{-2Ht} u_r^2) dV with half-cell gradients; exactly
  /// conserved by the semi-discrete flux form at H = 0.
  double energy(std::span<const double> u, std::span<const double> v, double ws2,
                double h) const {
    double kinetic = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) kinetic += cell_volume[i] * v[i] * v[i];
    double elastic = 0.0;
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      const double du = u[i + 1] - u[i];
      elastic += face_measure[i] * du * du * inv_h2;
    }
    return 0.5 * (kinetic + ws2 * elastic);
  }
};

void rk4_step(WaveState& state, double dt, const RadialGrid& grid, const ModelParams& params,
              bool parallel, Workspace& w) {
  const std::size_t m = state.u.size();
  auto& u = state.u;
  auto& v = state.v;
  const double t = state.t;
  auto rhs = [&](std::span<const double> uu, std::span<const double> vv, double tt,
                 std::span<double> du, std::span<double> dv) {
    const kernels::RhsSetup s = make_setup(tt, grid, params, w.lap);
    if (parallel)
      kernels::radial_rhs_parallel(uu, vv, du, dv, s);
    else
      kernels::radial_rhs_serial(uu, vv, du, dv, s);
  };

  rhs(u, v, t, w.k1u, w.k1v);
  for (std::size_t i = 0; i < m; ++i) {
    w.tu[i] = u[i] + 0.5 * dt * w.k1u[i];
    w.tv[i] = v[i] + 0.5 * dt * w.k1v[i];
  }
  rhs(w.tu, w.tv, t + 0.5 * dt, w.k2u, w.k2v);
  for (std::size_t i = 0; i < m; ++i) {
    w.tu[i] = u[i] + 0.5 * dt * w.k2u[i];
    w.tv[i] = v[i] + 0.5 * dt * w.k2v[i];
  }
  rhs(w.tu, w.tv, t + 0.5 * dt, w.k3u, w.k3v);
  for (std::size_t i = 0; i < m; ++i) {
    w.tu[i] = u[i] + dt * w.k3u[i];
    w.tv[i] = v[i] + dt * w.k3v[i];
  }
  rhs(w.tu, w.tv, t + dt, w.k4u, w.k4v);
  const double c = dt / 6.0;
  for (std::size_t i = 0; i < m; ++i) {
    u[i] += c * (w.k1u[i] + 2.0 * w.k2u[i] + 2.0 * w.k3u[i] + w.k4u[i]);
    v[i] += c * (w.k1v[i] + 2.0 * w.k2v[i] + 2.0 * w.k3v[i] + w.k4v[i]);
  }
  state.t = t + dt;
}

}  // namespace

WaveState step(const WaveState& state, double dt, const RadialGrid& grid,
               const ModelParams& params) {
  params.validate();
  if (!(dt > 0.0) || dt > 0.5 * grid.h * (1.0 + 1e-12))
    throw std::invalid_argument("step: need 0 < dt <= 0.5 h");
  if (state.u.size() != static_cast<std::size_t>(grid.m) || state.v.size() != state.u.size())
    throw std::invalid_argument("step: state size does not match grid");
  WaveState next = state;
  Workspace w(grid, params.n);
  rk4_step(next, dt, grid, params, true, w);
  return next;
}

BlowupReport evolve(const ModelParams& params, const RadialGrid& grid, WaveState state,
                    const EvolveControls& controls, const G1Profile* g1) {
  params.validate();
  if (state.u.size() != static_cast<std::size_t>(grid.m) || state.v.size() != state.u.size())
    throw std::invalid_argument("evolve: state size does not match grid");
  if (!(controls.T_max > 0.0)) throw std::invalid_argument("evolve: need T_max > 0");
  if (!(controls.sample_dt > 0.0)) throw std::invalid_argument("evolve: need sample_dt > 0");
  if (!(controls.cfl > 0.0) || controls.cfl > 0.5 + 1e-12)
    throw std::invalid_argument("evolve: need 0 < cfl <= 0.5");
  {
    const kernels::MaxAbs sup0 = kernels::max_abs_serial(state.u);
    if (!(controls.U_max > sup0.value))
      throw std::invalid_argument("evolve: U_max must exceed the initial sup|u|");
  }
  if (g1 && g1->phi1.size() != state.u.size())
    throw std::invalid_argument("evolve: G1 profile size does not match grid");

  const bool parallel = controls.use_parallel_kernels;
  const std::size_t m = state.u.size();
  const double dt_base = controls.cfl * grid.h;
  const std::vector<double> measure = grid.node_measure(params.n);
  Workspace w(grid, params.n);

  BlowupReport report;
  double next_sample = 0.0;
  const double t_eps = 1e-12 * std::max(1.0, controls.T_max);

  auto record_sample = [&](double sup) {
    if (!report.series.empty() && !(state.t > report.series.back().t)) return;
    SeriesSample s;
    s.t = state.t;
    s.sup_u = sup;
    s.G = kernels::dot_chunked(measure, state.u);
    s.Gp = kernels::dot_chunked(measure, state.v);
    {
      const kernels::RhsSetup setup = make_setup(state.t, grid, params, w.lap);
      if (parallel)
        kernels::radial_rhs_parallel(state.u, state.v, w.tu, w.tv, setup);
      else
        kernels::radial_rhs_serial(state.u, state.v, w.tu, w.tv, setup);
    }
    s.Gpp = kernels::dot_chunked(measure, w.tv);
    if (g1) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += measure[i] * g1->phi1[i] * state.u[i];
      s.G1 = std::exp(-g1->decay_rate * state.t) * acc;
    } else {
      s.G1 = std::numeric_limits<double>::quiet_NaN();
    }
    const double ws2 = std::exp(-2.0 * params.hubble * state.t);
    s.energy = w.energy(state.u, state.v, ws2, grid.h);
    for (std::size_t i = 0; i < m; ++i) w.scratch[i] = std::pow(std::abs(state.u[i]), params.p);
    s.lp_u = std::pow(kernels::dot_chunked(measure, w.scratch), 1.0 / params.p);
    for (std::size_t i = 0; i < m; ++i) w.scratch[i] = std::pow(std::abs(state.v[i]), params.p);
    s.lp_v = std::pow(kernels::dot_chunked(measure, w.scratch), 1.0 / params.p);
    report.series.push_back(s);
  };

  while (true) {
    const kernels::MaxAbs sup = parallel ? kernels::max_abs_parallel(state.u)
                                         : kernels::max_abs_serial(state.u);
    if (!sup.finite) {
      report.status = RunStatus::NumericalFailure;
      record_sample(std::numeric_limits<double>::quiet_NaN());
      break;
    }
    report.peak_sup = std::max(report.peak_sup, sup.value);
    if (controls.support_radius >= 0.0) {
      const double edge = controls.support_radius + state.t + 3.0 * grid.h;
      const auto j0 = static_cast<std::size_t>(
          std::min<double>(static_cast<double>(m), std::floor(edge / grid.h) + 1.0));
      report.support_leak = std::max(report.support_leak, kernels::max_abs_from(state.u, j0));
    }
    if (sup.value > controls.U_max) {
      report.status = RunStatus::BlewUp;
      record_sample(sup.value);
      report.T_est = fit_blowup_time(report.series, params.p, state.t);
      break;
    }
    if (state.t >= controls.T_max - t_eps) {
      report.status = RunStatus::SurvivedToTmax;
      record_sample(sup.value);
      break;
    }
    if (state.t >= next_sample - t_eps) {
      record_sample(sup.value);
      next_sample += controls.sample_dt;
    }
    const double dt = std::min(dt_base, controls.T_max - state.t);
    rk4_step(state, dt, grid, params, parallel, w);
  }

  report.t_end = state.t;
  return report;
}

BlowupReport evolve_until_blowup(const ModelParams& params, const InitialDataSpec& spec,
                                 const RadialGrid& grid, const EvolveControls& controls,
                                 const G1Profile* g1) {
  spec.validate();
  if (grid.r_max < 1.0 + controls.T_max)
    throw std::invalid_argument(
        "evolve_until_blowup: grid must contain the propagation cone, r_max >= 1 + T_max");
  return evolve(params, grid, make_initial_state(spec, grid), controls, g1);
}

LifespanEstimate lifespan_estimate(std::span<const BlowupReport> reports) {
  if (reports.size() < 2)
    throw std::invalid_argument("lifespan_estimate: need at least two refinements");
  for (const BlowupReport& r : reports)
    if (r.status != RunStatus::BlewUp)
      throw std::invalid_argument(
          "lifespan_estimate: blow-up not grid-converged (mixed statuses)");
  const double fine = reports[reports.size() - 1].T_est;
  const double prev = reports[reports.size() - 2].T_est;
  return {fine, std::abs(fine - prev)};
}

}  // namespace dsblow
