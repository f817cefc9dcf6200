#include "dsblow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dsblow/diagnostics.hpp"
#include "dsblow/special.hpp"

namespace dsblow {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void SweepConfig::validate_single() const {
  model.validate();
  data.validate();
  if (epsilons.empty()) throw std::invalid_argument("config: need at least one epsilon");
  if (refinements.empty()) throw std::invalid_argument("config: need at least one refinement");
  for (double e : epsilons)
    if (!(e > 0.0) || !(e <= 1.0))
      throw std::invalid_argument("config: epsilons must lie in (0, 1]");
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("config: epsilons must be strictly descending");
  for (std::size_t i = 0; i < refinements.size(); ++i) {
    if (refinements[i] < 128) throw std::invalid_argument("config: refinements need m >= 128");
    if (i > 0 && refinements[i] <= refinements[i - 1])
      throw std::invalid_argument("config: refinements must be strictly increasing");
  }
  if (!(controls.T_max > 0.0)) throw std::invalid_argument("config: need T_max > 0");
  if (!(controls.U_max > 0.0)) throw std::invalid_argument("config: need U_max > 0");
  if (quadrature_order < 16) throw std::invalid_argument("config: need quadrature order >= 16");
  if (r_max > 0.0 && r_max < 1.0 + controls.T_max)
    throw std::invalid_argument("config: r_max must cover the propagation cone 1 + T_max");
}

void SweepConfig::validate() const {
  validate_single();
  if (epsilons.size() < 3)
    throw std::invalid_argument("config: need at least 3 epsilons to fit a power law");
}

double SweepConfig::auto_r_max(int m) const {
  // solves r_max = 1 + T_max + 10 h with h = r_max/(m-1)
  return (1.0 + controls.T_max) * (m - 1) / static_cast<double>(m - 11);
}

double SweepConfig::window_lo() const {
  try {
    const DerivedConstants dc = derived_constants(model);
    return epsilon_window_lower(dc.a1, dc.b1, model.p);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double SweepConfig::theoretical_exponent() const {
  try {
    switch (model.kind) {
      case Nonlinearity::PowerU: return lifespan_exponent_strauss(model.n, model.p);
      case Nonlinearity::PowerGrad: return lifespan_exponent_glassey(model.p);
      case Nonlinearity::Linear: break;
    }
  } catch (const std::exception&) {
  }
  return std::numeric_limits<double>::quiet_NaN();
}

FitResult fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("fit_power_law: need at least 3 points");
  FitResult fit;
  fit.n_points = static_cast<int>(points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [eps, T] : points) {
    if (!(eps > 0.0) || !(T > 0.0))
      throw std::invalid_argument("fit_power_law: points must be positive");
    const double x = std::log(eps);
    const double y = std::log(T);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw std::invalid_argument("fit_power_law: epsilons must differ");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double mean_y = sy / n;
  double ss_res = 0.0, ss_tot = 0.0;
  fit.residuals.reserve(points.size());
  for (const auto& [eps, T] : points) {
    const double y = std::log(T);
    const double res = y - (fit.intercept + fit.slope * std::log(eps));
    fit.residuals.push_back(res);
    ss_res += res * res;
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  fit.r_squared = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate_single();
  const std::size_t ne = cfg.epsilons.size();
  const std::size_t nr = cfg.refinements.size();
  const std::size_t cells = ne * nr;

  struct Cell {
    SweepRecord record;
    std::vector<SeriesSample> series;
    bool finest = false;
  };
  std::vector<Cell> grid_cells(cells);

#pragma omp parallel for schedule(dynamic)
  for (long idx = 0; idx < static_cast<long>(cells); ++idx) {
    const std::size_t ie = static_cast<std::size_t>(idx) / nr;
    const std::size_t ir = static_cast<std::size_t>(idx) % nr;
    Cell& cell = grid_cells[static_cast<std::size_t>(idx)];
    const int m = cfg.refinements[ir];
    SweepRecord& rec = cell.record;
    rec.n = cfg.model.n;
    rec.H = cfg.model.hubble;
    rec.p = cfg.model.p;
    rec.kind = cfg.model.kind;
    rec.epsilon = cfg.epsilons[ie];
    rec.m = m;
    rec.T_est = std::numeric_limits<double>::quiet_NaN();
    rec.T_err = std::numeric_limits<double>::quiet_NaN();
    cell.finest = ir + 1 == nr;
    try {
      const RadialGrid grid = RadialGrid::make(cfg.grid_r_max(m), m);
      rec.dt = cfg.controls.cfl * grid.h;
      InitialDataSpec data = cfg.data;
      data.epsilon = cfg.epsilons[ie];
      G1Profile profile;
      const G1Profile* profile_ptr = nullptr;
      if (cfg.model.kind == Nonlinearity::PowerU && cfg.model.hubble > 0.0) {
        const TestFunctionContext ctx(cfg.model.n, cfg.quadrature_order, cfg.model.p,
                                      cfg.model.hubble);
        profile = make_g1_profile(grid, cfg.model, ctx);
        profile_ptr = &profile;
      }
      const BlowupReport report =
          evolve_until_blowup(cfg.model, data, grid, cfg.controls, profile_ptr);
      rec.status = report.status;
      rec.peak_sup = report.peak_sup;
      if (report.status == RunStatus::BlewUp) rec.T_est = report.T_est;
      cell.series = std::move(report.series);
    } catch (const std::exception&) {
      rec.status = RunStatus::NumericalFailure;
      rec.peak_sup = std::numeric_limits<double>::quiet_NaN();
    }
  }

  SweepResult result;
  result.records.reserve(cells);
  result.finest_series.resize(ne);
  for (std::size_t ie = 0; ie < ne; ++ie) {
    // Cauchy difference between the last two blown-up refinements
    for (std::size_t ir = 0; ir < nr; ++ir) {
      Cell& cell = grid_cells[ie * nr + ir];
      if (cell.finest && ir > 0) {
        const SweepRecord& prev = grid_cells[ie * nr + ir - 1].record;
        if (cell.record.status == RunStatus::BlewUp && prev.status == RunStatus::BlewUp)
          cell.record.T_err = std::abs(cell.record.T_est - prev.T_est);
      }
      if (cell.finest) result.finest_series[ie] = std::move(cell.series);
      result.records.push_back(cell.record);
    }
  }

  std::vector<std::pair<double, double>> fit_points;
  for (const SweepRecord& rec : result.records)
    if (rec.m == cfg.refinements.back() && rec.status == RunStatus::BlewUp)
      fit_points.emplace_back(rec.epsilon, rec.T_est);
  if (fit_points.size() >= 3) result.fit = fit_power_law(fit_points);
  result.theoretical_exponent = cfg.theoretical_exponent();
  result.window_lo = cfg.window_lo();
  result.window_hi = 1.0;
  return result;
}

namespace {

std::string epsilon_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string json_number(double x) {
  if (std::isnan(x) || std::isinf(x)) return "null";
  return format17(x);
}

}  // namespace

void write_outputs(const SweepResult& result, const SweepConfig& cfg, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);

  {
    std::ostringstream csv;
    csv << "# schema_version 1\n";
    csv << "schema_version,n,H,p,kind,epsilon,m,dt,status,T_est,T_err,peak_sup\n";
    for (const SweepRecord& r : result.records) {
      csv << "1," << r.n << ',' << format17(r.H) << ',' << format17(r.p) << ','
          << to_string(r.kind) << ',' << format17(r.epsilon) << ',' << r.m << ','
          << format17(r.dt) << ',' << to_string(r.status) << ',' << format17(r.T_est) << ','
          << format17(r.T_err) << ',' << format17(r.peak_sup) << '\n';
    }
    write_text_file(base / "sweep.csv", csv.str());
  }

  for (std::size_t ie = 0; ie < result.finest_series.size(); ++ie) {
    const auto& series = result.finest_series[ie];
    std::vector<double> rho(series.size(), std::numeric_limits<double>::quiet_NaN());
    if (!series.empty()) {
      try {
        rho = inequality_residuals(series, cfg.model).rho;
      } catch (const std::exception&) {
      }
    }
    std::ostringstream csv;
    csv << "# schema_version 1\n";
    csv << "t,sup_u,G,Gpp,G1,energy,rho1\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
      const SeriesSample& s = series[i];
      csv << format17(s.t) << ',' << format17(s.sup_u) << ',' << format17(s.G) << ','
          << format17(s.Gpp) << ',' << format17(s.G1) << ',' << format17(s.energy) << ','
          << format17(rho[i]) << '\n';
    }
    write_text_file(base / ("series_" + epsilon_tag(cfg.epsilons[ie]) + ".csv"), csv.str());
  }

  {
    std::ostringstream js;
    js << "{\n";
    if (result.fit) {
      js << "  \"slope\": " << json_number(result.fit->slope) << ",\n";
      js << "  \"intercept\": " << json_number(result.fit->intercept) << ",\n";
      js << "  \"r_squared\": " << json_number(result.fit->r_squared) << ",\n";
      js << "  \"n_points\": " << result.fit->n_points << ",\n";
    } else {
      js << "  \"slope\": null,\n  \"intercept\": null,\n  \"r_squared\": null,\n";
      int pts = 0;
      for (const SweepRecord& r : result.records)
        if (r.m == cfg.refinements.back() && r.status == RunStatus::BlewUp) ++pts;
      js << "  \"n_points\": " << pts << ",\n";
    }
    js << "  \"theoretical_exponent\": " << json_number(result.theoretical_exponent) << ",\n";
    js << "  \"window_lo\": " << json_number(result.window_lo) << ",\n";
    js << "  \"window_hi\": " << json_number(result.window_hi) << "\n";
    js << "}\n";
    write_text_file(base / "fit.json", js.str());
  }

  {
    std::ostringstream dat;
    for (const SweepRecord& r : result.records)
      if (r.m == cfg.refinements.back() && r.status == RunStatus::BlewUp)
        dat << format17(r.epsilon) << ' ' << format17(r.T_est) << '\n';
    write_text_file(base / "lifespan_vs_eps.dat", dat.str());

    std::ostringstream gp;
    gp << "set logscale xy\n"
       << "set xlabel 'epsilon'\n"
       << "set ylabel 'estimated lifespan'\n";
    if (result.fit)
      gp << "fitline(x) = exp(" << format17(result.fit->intercept) << ") * x**("
         << format17(result.fit->slope) << ")\n"
         << "plot 'lifespan_vs_eps.dat' u 1:2 w p pt 7 t 'measured', fitline(x) t 'fit'\n";
    else
      gp << "plot 'lifespan_vs_eps.dat' u 1:2 w p pt 7 t 'measured'\n";
    gp << "pause -1\n";
    write_text_file(base / "plot_lifespan.gp", gp.str());
  }

  write_text_file(base / "config.json", resolved_config_json(cfg));
}

std::vector<SweepRecord> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<SweepRecord> records;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 12) throw std::runtime_error("sweep.csv: malformed row: " + line);
    SweepRecord r;
    r.n = std::stoi(fields[1]);
    r.H = std::strtod(fields[2].c_str(), nullptr);
    r.p = std::strtod(fields[3].c_str(), nullptr);
    r.kind = nonlinearity_from_string(fields[4]);
    r.epsilon = std::strtod(fields[5].c_str(), nullptr);
    r.m = std::stoi(fields[6]);
    r.dt = std::strtod(fields[7].c_str(), nullptr);
    r.status = run_status_from_string(fields[8]);
    r.T_est = std::strtod(fields[9].c_str(), nullptr);
    r.T_err = std::strtod(fields[10].c_str(), nullptr);
    r.peak_sup = std::strtod(fields[11].c_str(), nullptr);
    records.push_back(r);
  }
  return records;
}

void write_region_map_csv(const std::string& path, const RegionMapSpec& spec,
                          const std::vector<RegionCell>& cells) {
  std::ostringstream csv;
  csv << "# schema_version 1\n";
  csv << "p,b1,A,R,G0,G0p,status,T_star\n";
  for (const RegionCell& c : cells) {
    csv << format17(c.p) << ',' << format17(c.b1) << ',' << format17(spec.A) << ','
        << format17(spec.R) << ',' << format17(spec.G0) << ',' << format17(spec.G0p) << ','
        << to_string(c.status) << ',' << format17(c.T_star) << '\n';
  }
  write_text_file(path, csv.str());
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }

  SweepConfig cfg;
  if (doc.contains("model")) {
    const json& m = doc["model"];
    cfg.model.n = m.value("n", cfg.model.n);
    cfg.model.hubble = m.value("H", cfg.model.hubble);
    cfg.model.p = m.value("p", cfg.model.p);
    if (m.contains("kind")) cfg.model.kind = nonlinearity_from_string(m["kind"]);
  }
  if (doc.contains("data")) {
    const json& d = doc["data"];
    cfg.data.epsilon = d.value("epsilon", cfg.data.epsilon);
    cfg.data.k_f = d.value("k_f", cfg.data.k_f);
    cfg.data.k_g = d.value("k_g", cfg.data.k_g);
    cfg.data.f_on = d.value("f_on", cfg.data.f_on);
    cfg.data.g_on = d.value("g_on", cfg.data.g_on);
  }
  if (doc.contains("controls")) {
    const json& c = doc["controls"];
    cfg.controls.T_max = c.value("T_max", cfg.controls.T_max);
    cfg.controls.U_max = c.value("U_max", cfg.controls.U_max);
    cfg.controls.sample_dt = c.value("sample_dt", cfg.controls.sample_dt);
    cfg.controls.cfl = c.value("cfl", cfg.controls.cfl);
  }
  int grid_m = 2048;
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    grid_m = g.value("m", grid_m);
    cfg.r_max = g.value("r_max", cfg.r_max);
  }
  cfg.quadrature_order = doc.value("quadrature_q", cfg.quadrature_order);
  cfg.output_dir = doc.value("output_dir", cfg.output_dir);
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    if (s.contains("epsilons")) cfg.epsilons = s["epsilons"].get<std::vector<double>>();
    if (s.contains("refinements")) cfg.refinements = s["refinements"].get<std::vector<int>>();
  }
  if (cfg.epsilons.empty()) cfg.epsilons = {cfg.data.epsilon};
  if (cfg.refinements.empty()) cfg.refinements = {grid_m};
  return cfg;
}

std::string resolved_config_json(const SweepConfig& cfg) {
  std::ostringstream js;
  js << "{\n";
  js << "  \"model\": {\"n\": " << cfg.model.n << ", \"H\": " << format17(cfg.model.hubble)
     << ", \"p\": " << format17(cfg.model.p) << ", \"kind\": \"" << to_string(cfg.model.kind)
     << "\"},\n";
  js << "  \"data\": {\"epsilon\": " << format17(cfg.data.epsilon)
     << ", \"k_f\": " << cfg.data.k_f << ", \"k_g\": " << cfg.data.k_g << ", \"f_on\": "
     << (cfg.data.f_on ? "true" : "false") << ", \"g_on\": " << (cfg.data.g_on ? "true" : "false")
     << "},\n";
  js << "  \"controls\": {\"T_max\": " << format17(cfg.controls.T_max)
     << ", \"U_max\": " << format17(cfg.controls.U_max)
     << ", \"sample_dt\": " << format17(cfg.controls.sample_dt)
     << ", \"cfl\": " << format17(cfg.controls.cfl) << "},\n";
  js << "  \"grid\": {\"m\": " << cfg.refinements.front()
     << ", \"r_max\": " << format17(cfg.r_max) << "},\n";
  js << "  \"quadrature_q\": " << cfg.quadrature_order << ",\n";
  js << "  \"sweep\": {\"epsilons\": [";
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i)
    js << (i ? ", " : "") << format17(cfg.epsilons[i]);
  js << "], \"refinements\": [";
  for (std::size_t i = 0; i < cfg.refinements.size(); ++i)
    js << (i ? ", " : "") << cfg.refinements[i];
  js << "]},\n";
  js << "  \"output_dir\": \"" << cfg.output_dir << "\"\n";
  js << "}\n";
  return js.str();
}

RegionMapSpec load_region_map_config(const std::string& path, std::string& output_dir) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  RegionMapSpec spec;
  auto axis = [&](const char* values_key, const char* range_key) {
    std::vector<double> vals;
    if (doc.contains(values_key)) {
      vals = doc[values_key].get<std::vector<double>>();
    } else if (doc.contains(range_key)) {
      const json& r = doc[range_key];
      const double lo = r.at("lo").get<double>();
      const double hi = r.at("hi").get<double>();
      const int count = r.at("count").get<int>();
      if (count < 1) throw std::invalid_argument("region map: axis count must be >= 1");
      for (int i = 0; i < count; ++i)
        vals.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
    return vals;
  };
  spec.p_values = axis("p_values", "p");
  spec.b1_values = axis("b1_values", "b1");
  if (spec.p_values.empty() || spec.b1_values.empty())
    throw std::invalid_argument("region map: need p and b1 axes");
  spec.A = doc.value("A", spec.A);
  spec.R = doc.value("R", spec.R);
  spec.G0 = doc.value("G0", spec.G0);
  spec.G0p = doc.value("G0p", spec.G0p);
  spec.T_max = doc.value("T_max", spec.T_max);
  spec.G_max = doc.value("G_max", spec.G_max);
  output_dir = doc.value("output_dir", std::string("out"));
  return spec;
}

}  // namespace dsblow
