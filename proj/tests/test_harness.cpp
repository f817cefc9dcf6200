#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsblow/harness.hpp"

using namespace dsblow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dsblow_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

SweepConfig tiny_sweep_config() {
  SweepConfig cfg;
  cfg.model = {3, 0.1, 2.0, Nonlinearity::PowerU};
  cfg.epsilons = {1.0, 0.8, 0.6};
  cfg.refinements = {128, 256};
  cfg.controls.T_max = 4.0;
  cfg.controls.sample_dt = 0.01;
  return cfg;
}

}  // namespace

TEST_CASE("power-law fit is exact on synthetic data") {
  std::vector<std::pair<double, double>> points;
  for (double eps : {1.0, 0.8, 0.6, 0.4, 0.2}) points.emplace_back(eps, 5.0 / eps);
  const FitResult fit = fit_power_law(points);
  CHECK(std::abs(fit.slope - (-1.0)) < 1e-12);
  CHECK(std::abs(fit.intercept - std::log(5.0)) < 1e-12);
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  for (double r : fit.residuals) CHECK(std::abs(r) < 1e-12);

  points.clear();
  for (double eps : {1.0, 0.5, 0.25}) points.emplace_back(eps, std::pow(eps, -0.5));
  CHECK(std::abs(fit_power_law(points).slope - (-0.5)) < 1e-12);
}

TEST_CASE("power-law fit requires three points") {
  std::vector<std::pair<double, double>> points{{1.0, 2.0}, {0.5, 4.0}};
  CHECK_THROWS_AS(fit_power_law(points), std::invalid_argument);
}

TEST_CASE("seventeen-digit formatting round-trips") {
  for (double x : {1.0 / 3.0, 3.141592653589793, 1e-300, 2.2e8}) {
    const std::string s = format17(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format17(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("config validation") {
  SweepConfig cfg = tiny_sweep_config();
  cfg.validate();

  SweepConfig two = cfg;
  two.epsilons = {1.0, 0.8};
  CHECK_THROWS_AS(two.validate(), std::invalid_argument);
  two.validate_single();

  SweepConfig ascending = cfg;
  ascending.epsilons = {0.6, 0.8, 1.0};
  CHECK_THROWS_AS(ascending.validate(), std::invalid_argument);

  SweepConfig out_of_range = cfg;
  out_of_range.epsilons = {1.2, 0.8, 0.6};
  CHECK_THROWS_AS(out_of_range.validate(), std::invalid_argument);

  SweepConfig small_grid = cfg;
  small_grid.refinements = {64};
  CHECK_THROWS_AS(small_grid.validate_single(), std::invalid_argument);
}

TEST_CASE("auto grid radius covers the cone with a ten-cell margin") {
  SweepConfig cfg = tiny_sweep_config();
  const double r_max = cfg.auto_r_max(1024);
  const double h = r_max / 1023.0;
  CHECK(r_max == doctest::Approx(1.0 + cfg.controls.T_max + 10.0 * h).epsilon(1e-12));
}

TEST_CASE("single-cell linear sweep survives and round-trips through csv") {
  SweepConfig cfg;
  cfg.model = {3, 0.1, 2.0, Nonlinearity::Linear};
  cfg.epsilons = {0.7};
  cfg.refinements = {128};
  cfg.controls.T_max = 1.0;
  cfg.controls.sample_dt = 0.05;
  const SweepResult result = run_sweep(cfg);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].status == RunStatus::SurvivedToTmax);
  CHECK_FALSE(result.fit.has_value());

  const fs::path dir = fresh_dir("single");
  write_outputs(result, cfg, dir.string());
  const auto records = read_sweep_csv((dir / "sweep.csv").string());
  REQUIRE(records.size() == 1);
  const SweepRecord& a = result.records[0];
  const SweepRecord& b = records[0];
  CHECK(a.n == b.n);
  CHECK(a.H == b.H);
  CHECK(a.p == b.p);
  CHECK(a.kind == b.kind);
  CHECK(a.epsilon == b.epsilon);
  CHECK(a.m == b.m);
  CHECK(a.dt == b.dt);
  CHECK(a.status == b.status);
  CHECK((std::isnan(a.T_est) ? std::isnan(b.T_est) : a.T_est == b.T_est));
  CHECK(a.peak_sup == b.peak_sup);
}

TEST_CASE("empty record list produces a header-only csv") {
  SweepResult empty;
  SweepConfig cfg = tiny_sweep_config();
  const fs::path dir = fresh_dir("empty");
  write_outputs(empty, cfg, dir.string());
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv == "# schema_version 1\n"
               "schema_version,n,H,p,kind,epsilon,m,dt,status,T_est,T_err,peak_sup\n");
  CHECK(read_sweep_csv((dir / "sweep.csv").string()).empty());
}

TEST_CASE("sweep outputs are deterministic byte for byte") {
  SweepConfig cfg = tiny_sweep_config();
  const fs::path dir1 = fresh_dir("det1");
  const fs::path dir2 = fresh_dir("det2");
  write_outputs(run_sweep(cfg), cfg, dir1.string());
  write_outputs(run_sweep(cfg), cfg, dir2.string());
  for (const auto& entry : fs::directory_iterator(dir1)) {
    const fs::path other = dir2 / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
  }
}

TEST_CASE("fit json carries seventeen significant digits") {
  SweepConfig cfg = tiny_sweep_config();
  cfg.refinements = {128};
  const SweepResult result = run_sweep(cfg);
  const fs::path dir = fresh_dir("fitjson");
  write_outputs(result, cfg, dir.string());
  const std::string js = slurp(dir / "fit.json");
  CHECK(js.find("\"theoretical_exponent\": 1\n") != std::string::npos);
  CHECK(js.find("\"window_lo\": 0.5") != std::string::npos);
  if (result.fit) {
    const std::string want = "\"slope\": " + format17(result.fit->slope);
    CHECK(js.find(want) != std::string::npos);
  }
}

TEST_CASE("config files load with defaults materialized") {
  const fs::path dir = fresh_dir("cfg");
  const fs::path cfg_path = dir / "run.json";
  write_file(cfg_path, R"({
    "model": {"n": 2, "H": 0.3, "p": 1.5, "kind": "PowerGrad"},
    "data": {"epsilon": 0.9},
    "controls": {"T_max": 2.5},
    "grid": {"m": 512}
  })");
  const SweepConfig cfg = load_config(cfg_path.string());
  CHECK(cfg.model.n == 2);
  CHECK(cfg.model.kind == Nonlinearity::PowerGrad);
  CHECK(cfg.model.p == 1.5);
  CHECK(cfg.data.epsilon == 0.9);
  CHECK(cfg.controls.T_max == 2.5);
  CHECK(cfg.controls.U_max == 1e8);  // default materialized
  CHECK(cfg.refinements == std::vector<int>{512});
  CHECK(cfg.epsilons == std::vector<double>{0.9});

  const std::string echo = resolved_config_json(cfg);
  CHECK(echo.find("\"U_max\": 100000000") != std::string::npos);
  CHECK(echo.find("\"kind\": \"PowerGrad\"") != std::string::npos);

  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), std::invalid_argument);
  write_file(dir / "bad.json", "{not json");
  CHECK_THROWS_AS(load_config((dir / "bad.json").string()), std::invalid_argument);
}

TEST_CASE("cli: exponents subcommand prints the critical values") {
  std::ostringstream out, err;
  const int rc = cli_dispatch({"exponents", "3", "2.0"}, out, err);
  CHECK(rc == 0);
  CHECK(out.str().find("p_c=2.414213") != std::string::npos);
  CHECK(out.str().find("lifespan_exponent_strauss=1\n") != std::string::npos);
  CHECK(out.str().find("kato_condition_power_u=true") != std::string::npos);
}

TEST_CASE("cli: validation failures exit with code 1") {
  std::ostringstream out, err;
  CHECK(cli_dispatch({"exponents", "1", "2.0"}, out, err) == 1);
  CHECK(cli_dispatch({"simulate", "--config", "missing.json"}, out, err) == 1);
  CHECK(err.str().find("missing.json") != std::string::npos);
  CHECK(cli_dispatch({"unknown-subcommand"}, out, err) == 1);
  CHECK(cli_dispatch({"exponents", "3", "2.0", "--bogus-flag"}, out, err) == 1);
}

TEST_CASE("cli: ode-lab integrates and reports") {
  std::ostringstream out, err;
  const int rc = cli_dispatch({"ode-lab", "--A", "1", "--b1", "0", "--p", "2", "--G0", "1",
                               "--G0p", "1"},
                              out, err);
  CHECK(rc == 0);
  CHECK(out.str().find("status=BlewUp") != std::string::npos);
  CHECK(out.str().find("T_star=") != std::string::npos);
}

TEST_CASE("cli: sweep runs from a config file and is rerun-identical") {
  const fs::path dir = fresh_dir("clisweep");
  const fs::path cfg_path = dir / "sweep.json";
  const fs::path out1 = dir / "out1";
  const fs::path out2 = dir / "out2";
  write_file(cfg_path, R"({
    "model": {"n": 3, "H": 0.1, "p": 2.0, "kind": "PowerU"},
    "controls": {"T_max": 4.0, "sample_dt": 0.01},
    "sweep": {"epsilons": [1.0, 0.8, 0.6], "refinements": [128, 256]}
  })");
  std::ostringstream o1, o2, e1, e2;
  REQUIRE(cli_dispatch({"sweep", "--config", cfg_path.string(), "--out", out1.string()}, o1,
                       e1) == 0);
  REQUIRE(cli_dispatch({"sweep", "--config", cfg_path.string(), "--out", out2.string()}, o2,
                       e2) == 0);
  for (const auto& entry : fs::directory_iterator(out1)) {
    const fs::path other = out2 / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
  }
  CHECK(fs::exists(out1 / "sweep.csv"));
  CHECK(fs::exists(out1 / "fit.json"));
  CHECK(fs::exists(out1 / "config.json"));
  CHECK(fs::exists(out1 / "series_1.csv"));
  CHECK(fs::exists(out1 / "lifespan_vs_eps.dat"));
  CHECK(fs::exists(out1 / "plot_lifespan.gp"));
}

TEST_CASE("cli: simulate writes a report and series") {
  const fs::path dir = fresh_dir("clisim");
  const fs::path cfg_path = dir / "run.json";
  write_file(cfg_path, R"({
    "model": {"n": 3, "H": 0.0, "p": 2.0, "kind": "Linear"},
    "data": {"epsilon": 1.0},
    "controls": {"T_max": 1.0, "sample_dt": 0.1},
    "grid": {"m": 256}
  })");
  std::ostringstream out, err;
  const int rc = cli_dispatch(
      {"simulate", "--config", cfg_path.string(), "--out", (dir / "out").string()}, out, err);
  CHECK(rc == 0);
  CHECK(out.str().find("status=SurvivedToTmax") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(fs::exists(dir / "out" / "series_1.csv"));
  const std::string report = slurp(dir / "out" / "report.json");
  CHECK(report.find("\"status\": \"SurvivedToTmax\"") != std::string::npos);
}

TEST_CASE("cli: region map writes the classification table") {
  const fs::path dir = fresh_dir("cliregion");
  const fs::path cfg_path = dir / "map.json";
  write_file(cfg_path, R"({
    "p": {"lo": 1.5, "hi": 2.5, "count": 3},
    "b1_values": [0.0, 4.0],
    "A": 1.0, "G0": 1.0, "G0p": 1.0, "T_max": 50.0
  })");
  std::ostringstream out, err;
  const int rc = cli_dispatch(
      {"region-map", "--config", cfg_path.string(), "--out", (dir / "out").string()}, out, err);
  CHECK(rc == 0);
  const std::string csv = slurp(dir / "out" / "region_map.csv");
  CHECK(csv.find("p,b1,A,R,G0,G0p,status,T_star") != std::string::npos);
  CHECK(csv.find("BlewUp") != std::string::npos);
  // 6 cells + 2 header lines
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 8);
}
