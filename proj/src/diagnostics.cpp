#include "dsblow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsblow/kernels.hpp"

namespace dsblow {

double functional_G(const WaveState& state, const RadialGrid& grid, int n, bool parallel) {
  if (state.u.size() != static_cast<std::size_t>(grid.m))
    throw std::invalid_argument("functional_G: state size does not match grid");
  const std::vector<double> measure = grid.node_measure(n);
  return parallel ? kernels::dot_chunked(measure, state.u)
                  : kernels::dot_serial(measure, state.u);
}

G1Profile make_g1_profile(const RadialGrid& grid, const ModelParams& params,
                          const TestFunctionContext& ctx) {
  params.validate();
  if (params.kind != Nonlinearity::PowerU)
    throw std::domain_error("G1 is defined for the PowerU model only");
  if (!(params.hubble > 0.0)) throw std::domain_error("G1 requires H > 0");
  if (grid.r_max > 700.0)
    throw std::domain_error("G1 profile: r_max too large for the unscaled phi1");
  G1Profile profile;
  profile.decay_rate = ctx.psi2_decay_rate();
  profile.phi1.resize(static_cast<std::size_t>(grid.m));
  for (int i = 0; i < grid.m; ++i)
    profile.phi1[static_cast<std::size_t>(i)] = ctx.phi1(grid.r(i));
  return profile;
}

double functional_G1(const WaveState& state, const RadialGrid& grid,
                     const ModelParams& params, const TestFunctionContext& ctx) {
  if (state.u.size() != static_cast<std::size_t>(grid.m))
    throw std::invalid_argument("functional_G1: state size does not match grid");
  const G1Profile profile = make_g1_profile(grid, params, ctx);
  const std::vector<double> measure = grid.node_measure(params.n);
  double acc = 0.0;
  for (std::size_t i = 0; i < measure.size(); ++i)
    acc += measure[i] * profile.phi1[i] * state.u[i];
  return std::exp(-profile.decay_rate * state.t) * acc;
}

ResidualReport inequality_residuals(std::span<const SeriesSample> series,
                                    const ModelParams& params) {
  params.validate();
  if (series.empty()) throw std::invalid_argument("inequality_residuals: empty series");
  ResidualReport report;
  report.degenerate = params.kind == Nonlinearity::Linear;
  report.rho.reserve(series.size());
  report.inf_rho = std::numeric_limits<double>::infinity();
  report.sup_rho = -std::numeric_limits<double>::infinity();
  const double np1 = params.n * (params.p - 1.0);
  bool any = false;
  for (const SeriesSample& s : series) {
    double rho = std::numeric_limits<double>::quiet_NaN();
    if (params.kind == Nonlinearity::PowerGrad) {
      const double denom = std::exp(-np1 * params.hubble * s.t) *
                           std::pow(std::abs(s.Gp), params.p);
      rho = denom > 1e-300 ? s.Gpp / denom : 0.0;
    } else {
      if (s.G <= 0.0) {
        ++report.g_nonpositive;
      } else {
        const double denom = std::exp(-np1 * s.t) * std::pow(s.G, params.p);
        rho = denom > 1e-300 ? s.Gpp / denom : 0.0;
      }
    }
    if (!std::isnan(rho)) {
      report.inf_rho = std::min(report.inf_rho, rho);
      report.sup_rho = std::max(report.sup_rho, rho);
      any = true;
    }
    report.rho.push_back(rho);
  }
  if (!any) {
    report.inf_rho = std::numeric_limits<double>::quiet_NaN();
    report.sup_rho = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

int convexity_violations(std::span<const SeriesSample> series) {
  if (series.size() < 3)
    throw std::invalid_argument("convexity_violations: need at least 3 samples");
  double max_gpp = 0.0;
  for (const SeriesSample& s : series) max_gpp = std::max(max_gpp, std::abs(s.Gpp));
  const double tol = 1e-8 * max_gpp;
  int count = 0;
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    const double t0 = series[i - 1].t, t1 = series[i].t, t2 = series[i + 1].t;
    const double g0 = series[i - 1].G, g1 = series[i].G, g2 = series[i + 1].G;
    // three-point second difference on a possibly nonuniform stencil
    const double second = 2.0 * (g0 / ((t1 - t0) * (t2 - t0)) - g1 / ((t1 - t0) * (t2 - t1)) +
                                 g2 / ((t2 - t0) * (t2 - t1)));
    if (second < -tol) ++count;
  }
  return count;
}

double loglog_growth_slope(std::span<const SeriesSample> series, double t_lo, double t_hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (const SeriesSample& s : series) {
    if (s.t < t_lo || s.t > t_hi || !(s.G > 0.0)) continue;
    const double x = std::log1p(s.t);
    const double y = std::log(s.G);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2)
    throw std::invalid_argument("loglog_growth_slope: need at least 2 usable samples");
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) throw std::runtime_error("loglog_growth_slope: degenerate window");
  return (count * sxy - sx * sy) / denom;
}

}  // namespace dsblow
