#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "dsblow/diagnostics.hpp"
#include "dsblow/harness.hpp"
#include "dsblow/model.hpp"
#include "dsblow/odelab.hpp"
#include "dsblow/special.hpp"

namespace dsblow {

namespace {

void apply_worker_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("DSBLOW_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

int run_exponents(int n, double p, std::ostream& out) {
  if (n < 2) throw std::domain_error("exponents: need n >= 2");
  if (!(p > 1.0)) throw std::domain_error("exponents: need p > 1");
  const double pc = strauss_exponent(n);
  const double pcg = glassey_exponent(n);
  out << "n=" << n << " p=" << format17(p) << '\n';
  out << "p_c=" << format17(pc) << '\n';
  out << "p_c_prime=" << format17(pcg) << '\n';
  if (p < pc) {
    out << "lifespan_exponent_strauss=" << format17(lifespan_exponent_strauss(n, p)) << '\n';
  } else {
    out << "lifespan_exponent_strauss=n/a (p >= p_c)\n";
  }
  out << "lifespan_exponent_glassey=" << format17(lifespan_exponent_glassey(p)) << '\n';

  ModelParams power_u{n, 0.0, p, Nonlinearity::PowerU};
  const DerivedConstants dcu = derived_constants(power_u);
  out << "kato_condition_power_u=" << (kato_condition(dcu.a1, dcu.b1, p) ? "true" : "false")
      << " (a1=" << format17(dcu.a1) << ", b1=" << format17(dcu.b1) << ")\n";
  // the derivative model gives b1 - a1(p-1) = 1 for every H > 0
  out << "kato_condition_power_grad=true (b1-a1(p-1)=1 for any H>0)\n";
  out << "epsilon_window_lo_power_u=" << format17(epsilon_window_lower(dcu.a1, dcu.b1, p))
      << '\n';
  return 0;
}

int run_testfn_check(int n, int q, double p, double hubble, std::ostream& out) {
  const TestFunctionContext ctx(n, q, p, hubble > 0.0 ? hubble : 0.5);
  bool ok = true;
  auto line = [&](bool pass, const std::string& what) {
    out << (pass ? "[ok]   " : "[FAIL] ") << what << '\n';
    ok = ok && pass;
  };

  {
    const double v0 = ctx.phi1(0.0);
    const double expected = unit_sphere_area(n);
    line(std::abs(v0 - expected) <= 1e-12 * expected,
         "phi1(0) equals the unit sphere area: " + format17(v0));
  }
  if (n == 3) {
    double worst = 0.0;
    for (double r = 0.01; r <= 100.0; r *= 1.45) {
      const double closed = 4.0 * std::numbers::pi * std::sinh(r) / r * std::exp(-r);
      worst = std::max(worst, std::abs(ctx.phi1_scaled(r) - closed) / closed);
    }
    line(worst < 1e-10, "phi1 matches 4 pi sinh(r)/r, max rel err " + format17(worst));
  }
  {
    const EigenResidual res1 = verify_eigenfunction(0.5, 10.0, 2e-3, ctx);
    const EigenResidual res2 = verify_eigenfunction(0.5, 10.0, 1e-3, ctx);
    const double ratio = res1.residual / res2.residual;
    line(ratio > 3.5 && ratio < 4.5,
         "eigenfunction defect is second order, halving ratio " + format17(ratio));
  }
  {
    const double c20 = asymptotic_constant(20.0, ctx);
    const double c40 = asymptotic_constant(40.0, ctx);
    line(std::abs(c40 - c20) / std::abs(c40) < 0.01,
         "asymptotic constant settled: phi1 r^{(n-1)/2} e^{-r} -> " + format17(c40));
  }
  {
    const double decay = n - 1 - 0.5 * (n - 1) * p / (p - 1.0);
    double worst = 0.0;
    for (double t = 0.0; t <= 50.0; t += 5.0) {
      const double ratio = psi1_cone_integral(t, ctx) / std::pow(1.0 + t, decay);
      worst = std::max(worst, ratio);
    }
    line(std::isfinite(worst) && worst > 0.0,
         "cone integral growth ratio bounded, max " + format17(worst));
  }
  return ok ? 0 : 2;
}

void write_single_report(const SweepConfig& cfg, const BlowupReport& report, int m, double dt,
                         const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream js;
  js << "{\n";
  js << "  \"status\": \"" << to_string(report.status) << "\",\n";
  js << "  \"T_est\": "
     << (report.status == RunStatus::BlewUp ? format17(report.T_est) : "null") << ",\n";
  js << "  \"t_end\": " << format17(report.t_end) << ",\n";
  js << "  \"peak_sup\": " << format17(report.peak_sup) << ",\n";
  js << "  \"support_leak\": " << format17(report.support_leak) << ",\n";
  js << "  \"n\": " << cfg.model.n << ",\n";
  js << "  \"H\": " << format17(cfg.model.hubble) << ",\n";
  js << "  \"p\": " << format17(cfg.model.p) << ",\n";
  js << "  \"kind\": \"" << to_string(cfg.model.kind) << "\",\n";
  js << "  \"epsilon\": " << format17(cfg.data.epsilon) << ",\n";
  js << "  \"m\": " << m << ",\n";
  js << "  \"dt\": " << format17(dt) << "\n";
  js << "}\n";
  std::ofstream out(std::filesystem::path(dir) / "report.json", std::ios::binary);
  out << js.str();
}

int run_simulate(const std::string& config_path, const std::string& out_dir_override,
                 std::ostream& out, std::ostream& err) {
  SweepConfig cfg = load_config(config_path);
  if (!out_dir_override.empty()) cfg.output_dir = out_dir_override;
  cfg.validate_single();
  const double wlo = cfg.window_lo();
  if (std::isfinite(wlo) && cfg.data.epsilon < wlo)
    err << "warning: epsilon " << format17(cfg.data.epsilon)
        << " below the lifespan-statement window lower end " << format17(wlo) << '\n';
  if (!cfg.data.theorem_data())
    err << "warning: data switches do not meet the sign/support assumptions\n";

  const int m = cfg.refinements.front();
  const RadialGrid grid = RadialGrid::make(cfg.grid_r_max(m), m);
  G1Profile profile;
  const G1Profile* profile_ptr = nullptr;
  if (cfg.model.kind == Nonlinearity::PowerU && cfg.model.hubble > 0.0) {
    const TestFunctionContext ctx(cfg.model.n, cfg.quadrature_order, cfg.model.p,
                                  cfg.model.hubble);
    profile = make_g1_profile(grid, cfg.model, ctx);
    profile_ptr = &profile;
  }
  const BlowupReport report =
      evolve_until_blowup(cfg.model, cfg.data, grid, cfg.controls, profile_ptr);

  SweepResult single;
  SweepRecord rec;
  rec.n = cfg.model.n;
  rec.H = cfg.model.hubble;
  rec.p = cfg.model.p;
  rec.kind = cfg.model.kind;
  rec.epsilon = cfg.data.epsilon;
  rec.m = m;
  rec.dt = cfg.controls.cfl * grid.h;
  rec.status = report.status;
  rec.T_est = report.status == RunStatus::BlewUp ? report.T_est
                                                 : std::numeric_limits<double>::quiet_NaN();
  rec.T_err = std::numeric_limits<double>::quiet_NaN();
  rec.peak_sup = report.peak_sup;
  single.records.push_back(rec);
  single.finest_series.push_back(report.series);
  single.theoretical_exponent = cfg.theoretical_exponent();
  single.window_lo = wlo;
  SweepConfig echo = cfg;
  echo.epsilons = {cfg.data.epsilon};
  echo.refinements = {m};
  write_outputs(single, echo, cfg.output_dir);
  write_single_report(cfg, report, m, rec.dt, cfg.output_dir);

  out << "status=" << to_string(report.status);
  if (report.status == RunStatus::BlewUp) out << " T_est=" << format17(report.T_est);
  out << " t_end=" << format17(report.t_end) << " peak_sup=" << format17(report.peak_sup)
      << " support_leak=" << format17(report.support_leak) << '\n';
  out << "outputs written to " << cfg.output_dir << '\n';
  return report.status == RunStatus::NumericalFailure ? 2 : 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_dir_override,
                  std::ostream& out, std::ostream& err) {
  SweepConfig cfg = load_config(config_path);
  if (!out_dir_override.empty()) cfg.output_dir = out_dir_override;
  cfg.validate();
  const double wlo = cfg.window_lo();
  for (double eps : cfg.epsilons)
    if (std::isfinite(wlo) && eps < wlo)
      err << "warning: epsilon " << format17(eps)
          << " below the lifespan-statement window lower end " << format17(wlo) << '\n';

  const SweepResult result = run_sweep(cfg);
  write_outputs(result, cfg, cfg.output_dir);
  int blew = 0, survived = 0, failed = 0;
  for (const SweepRecord& r : result.records) {
    if (r.status == RunStatus::BlewUp) ++blew;
    if (r.status == RunStatus::SurvivedToTmax) ++survived;
    if (r.status == RunStatus::NumericalFailure) ++failed;
  }
  out << "cells=" << result.records.size() << " blew_up=" << blew << " survived=" << survived
      << " failed=" << failed << '\n';
  if (result.fit)
    out << "fit: slope=" << format17(result.fit->slope)
        << " intercept=" << format17(result.fit->intercept)
        << " r_squared=" << format17(result.fit->r_squared)
        << " theoretical_exponent=" << format17(result.theoretical_exponent) << '\n';
  out << "outputs written to " << cfg.output_dir << '\n';
  return failed == static_cast<int>(result.records.size()) && failed > 0 ? 2 : 0;
}

int run_ode_lab(const KatoProblem& prob, const KatoControls& ctrl, double rescale_eps,
                double a1, std::ostream& out) {
  const OdeOutcome res = integrate_kato_ode(prob, ctrl);
  out << "status=" << to_string(res.status);
  if (res.status == RunStatus::BlewUp) out << " T_star=" << format17(res.T_star);
  out << " t_end=" << format17(res.t_end) << " G_end=" << format17(res.G_end)
      << " Gp_end=" << format17(res.Gp_end) << '\n';

  if (rescale_eps > 0.0) {
    const RescaledProblem rp = rescale_problem(rescale_eps, a1, prob);
    out << "rescale: epsilon=" << format17(rescale_eps) << " D=" << format17(rp.exponent_D)
        << " tau_scale=" << format17(rp.tau_scale) << " g_scale=" << format17(rp.g_scale)
        << " coefficient_horizon=" << format17(rp.coefficient_horizon()) << '\n';
    const OdeOutcome res2 = integrate_kato_ode(
        rp.base, ctrl, [&rp](double tau) { return rp.coefficient(tau); });
    out << "rescaled: status=" << to_string(res2.status);
    if (res2.status == RunStatus::BlewUp) {
      out << " tau_star=" << format17(res2.T_star);
      if (res.status == RunStatus::BlewUp)
        out << " t_star*tau_scale=" << format17(res.T_star * rp.tau_scale);
    }
    out << '\n';
  }
  return res.status == RunStatus::NumericalFailure ? 2 : 0;
}

int run_region_map(const std::string& config_path, const std::string& out_dir_override,
                   std::ostream& out) {
  std::string dir;
  const RegionMapSpec spec = load_region_map_config(config_path, dir);
  if (!out_dir_override.empty()) dir = out_dir_override;
  const std::vector<RegionCell> cells = blowup_region_map(spec);
  std::filesystem::create_directories(dir);
  write_region_map_csv((std::filesystem::path(dir) / "region_map.csv").string(), spec, cells);
  int blew = 0;
  for (const RegionCell& c : cells)
    if (c.status == RunStatus::BlewUp) ++blew;
  out << "cells=" << cells.size() << " blew_up=" << blew << '\n';
  out << "outputs written to " << dir << '\n';
  return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  apply_worker_env();

  CLI::App app{"numerical laboratory for blow-up of semilinear waves on an exponentially "
               "expanding background"};
  app.require_subcommand(1);

  int exp_n = 3;
  double exp_p = 2.0;
  auto* exponents =
      app.add_subcommand("exponents", "critical exponents and criterion verdicts");
  exponents->add_option("n", exp_n, "spatial dimension")->required();
  exponents->add_option("p", exp_p, "nonlinearity exponent")->required();

  int tf_n = 3, tf_q = 64;
  double tf_p = 2.0, tf_h = 0.5;
  auto* testfn = app.add_subcommand("testfn-check", "verify the eigenfunction machinery");
  testfn->add_option("--n", tf_n, "spatial dimension");
  testfn->add_option("--q", tf_q, "angular quadrature order");
  testfn->add_option("--p", tf_p, "exponent used by the decaying weights");
  testfn->add_option("--H", tf_h, "expansion rate used by psi2");

  std::string sim_config, sim_out;
  auto* simulate = app.add_subcommand("simulate", "run one evolution from a config file");
  simulate->add_option("--config", sim_config, "JSON config path")->required();
  simulate->add_option("--out", sim_out, "output directory override");

  std::string sweep_config, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "amplitude sweep with refinements and fit");
  sweep->add_option("--config", sweep_config, "JSON config path")->required();
  sweep->add_option("--out", sweep_out, "output directory override");

  KatoProblem prob;
  KatoControls kctrl;
  double rescale_eps = 0.0, rescale_a1 = 1.0;
  auto* odelab = app.add_subcommand("ode-lab", "integrate the criterion ODE");
  odelab->add_option("--A", prob.A, "source amplitude");
  odelab->add_option("--b1", prob.b1, "source decay rate");
  odelab->add_option("--R", prob.R, "time shift");
  odelab->add_option("--p", prob.p, "exponent");
  odelab->add_option("--G0", prob.G0, "initial value");
  odelab->add_option("--G0p", prob.G0p, "initial slope");
  odelab->add_option("--T-max", kctrl.T_max, "time horizon");
  odelab->add_option("--G-max", kctrl.G_max, "blow-up threshold");
  odelab->add_option("--rescale", rescale_eps, "also run the amplitude-rescaled problem");
  odelab->add_option("--a1", rescale_a1, "growth exponent used by the rescaling");

  std::string region_config, region_out;
  auto* region = app.add_subcommand("region-map", "classify a (p, b1) parameter grid");
  region->add_option("--config", region_config, "JSON config path")->required();
  region->add_option("--out", region_out, "output directory override");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return 1;
  }

  try {
    if (exponents->parsed()) return run_exponents(exp_n, exp_p, out);
    if (testfn->parsed()) return run_testfn_check(tf_n, tf_q, tf_p, tf_h, out);
    if (simulate->parsed()) return run_simulate(sim_config, sim_out, out, err);
    if (sweep->parsed()) return run_sweep_cmd(sweep_config, sweep_out, out, err);
    if (odelab->parsed()) return run_ode_lab(prob, kctrl, rescale_eps, rescale_a1, out);
    if (region->parsed()) return run_region_map(region_config, region_out, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace dsblow
