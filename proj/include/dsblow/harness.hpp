#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsblow/grid.hpp"
#include "dsblow/model.hpp"
#include "dsblow/odelab.hpp"
#include "dsblow/solver.hpp"

namespace dsblow {

/// Shortest string that round-trips the double exactly (17 significant
/// digits); "nan"/"inf" spelled out.
std::string format17(double x);

/// Configuration of one run or of an amplitude sweep. All fields have
/// working defaults; the resolved form is echoed into the output directory
/// so artifacts are self-describing.
struct SweepConfig {
  ModelParams model;
  InitialDataSpec data;
  EvolveControls controls;
  std::vector<double> epsilons;   // descending, in (0, 1]
  std::vector<int> refinements;   // grid node counts, coarse to fine
  double r_max = 0.0;             // 0 -> 1 + T_max + 10h per refinement
  int quadrature_order = 64;
  std::string output_dir = "out";

  void validate_single() const;   // one run: >= 1 epsilon, >= 1 refinement
  void validate() const;          // sweep: >= 3 epsilons for fitting
  double auto_r_max(int m) const;
  double grid_r_max(int m) const { return r_max > 0.0 ? r_max : auto_r_max(m); }

  /// Lower end of the amplitude window of the lifespan statement; NaN when
  /// not applicable.
  double window_lo() const;
  /// Lifespan exponent the fit is compared against; NaN when not applicable.
  double theoretical_exponent() const;
};

struct SweepRecord {
  int n = 3;
  double H = 0.0;
  double p = 2.0;
  Nonlinearity kind = Nonlinearity::PowerU;
  double epsilon = 1.0;
  int m = 0;
  double dt = 0.0;
  RunStatus status = RunStatus::SurvivedToTmax;
  double T_est = 0.0;
  double T_err = 0.0;
  double peak_sup = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
  std::vector<double> residuals;
};

/// Least-squares fit of log T against log eps. Requires >= 3 points.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& points);

struct SweepResult {
  std::vector<SweepRecord> records;                      // epsilon-major, refinement-minor
  std::vector<std::vector<SeriesSample>> finest_series;  // one per epsilon
  std::optional<FitResult> fit;
  double theoretical_exponent = 0.0;
  double window_lo = 0.0;
  double window_hi = 1.0;
};

/// Runs every (epsilon, refinement) cell; cells execute concurrently and
/// per-cell failures are recorded inline, never propagated. Deterministic:
/// identical configs produce identical results for any worker count.
SweepResult run_sweep(const SweepConfig& cfg);

/// Emits sweep.csv, series_<eps>.csv, fit.json, plot data and the resolved
/// config into dir.
void write_outputs(const SweepResult& result, const SweepConfig& cfg, const std::string& dir);

std::vector<SweepRecord> read_sweep_csv(const std::string& path);

void write_region_map_csv(const std::string& path, const RegionMapSpec& spec,
                          const std::vector<RegionCell>& cells);

/// Loads a run/sweep configuration from a JSON document, materializing
/// defaults for absent keys.
SweepConfig load_config(const std::string& path);
std::string resolved_config_json(const SweepConfig& cfg);

RegionMapSpec load_region_map_config(const std::string& path, std::string& output_dir);

/// Command-line entry point: subcommands exponents, testfn-check, simulate,
/// sweep, ode-lab, region-map. Returns 0 on success, 1 on validation
/// errors, 2 on runtime failures.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dsblow
