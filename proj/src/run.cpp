#include "gaincap/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gaincap/svg.hpp"
#include "gaincap/version.hpp"

namespace gaincap::shell {

namespace {

const char* status_token(spectrum::SolveStatus s) {
  switch (s) {
    case spectrum::SolveStatus::ConstraintInactive:
      return "constraint_inactive";
    case spectrum::SolveStatus::ConstraintActive:
      return "constraint_active";
    case spectrum::SolveStatus::Infeasible:
      return "infeasible";
  }
  return "?";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

pareto::ParetoPoint solve_point(const RunConfig& cfg, double eta) {
  const auto& tc = cfg.trace;
  switch (tc.scenario) {
    case pareto::Scenario::PsdAndTerminations: {
      const auto grid = circuit::FrequencyGrid::symmetric(tc.grid_omega_max,
                                                          tc.grid_samples);
      return pareto::optimize_terminations_A(eta, cfg.params, tc.P, grid, tc);
    }
    case pareto::Scenario::UniformPsd:
      return pareto::optimize_terminations_B(eta, cfg.params, tc.P, tc.omega_B,
                                             false, tc);
    case pareto::Scenario::UniformPsdMatched:
      return pareto::optimize_terminations_B(eta, cfg.params, tc.P, tc.omega_B,
                                             true, tc);
  }
  throw std::logic_error("unreachable scenario");
}

void write_meta(const RunConfig& cfg, std::vector<std::string>& files) {
  nlohmann::json meta;
  meta["version"] = version_string;
  meta["config"] = config_to_json(cfg);
  meta["normalization"] = {
      {"g_m", cfg.norm.g_m}, {"C_gd", cfg.norm.C_gd}, {"N0", cfg.norm.N0}};
  const std::string path = cfg.out_dir + "/meta.json";
  write_text(path, meta.dump(2) + "\n");
  files.push_back(path);
}

svg::Series series_from_table(const csvio::Table& t, const std::string& x_col,
                              const std::string& y_col,
                              const std::string& label) {
  const std::size_t xi = t.column_index(x_col);
  const std::size_t yi = t.column_index(y_col);
  svg::Series s;
  s.label = label;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][xi].empty() || t.rows[r][yi].empty()) continue;
    s.x.push_back(t.number(r, xi));
    s.y.push_back(t.number(r, yi));
  }
  return s;
}

}  // namespace

std::string psd_filename(double eta) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "psd_%.6g.csv", eta);
  return buf;
}

csvio::Table pareto_table(const std::vector<pareto::ParetoPoint>& points) {
  csvio::Table t;
  t.columns = {"eta", "capacity", "g_s", "g_l", "L",
               "lambda", "mu", "p_out", "status"};
  for (const auto& p : points) {
    std::vector<std::string> row(t.columns.size());
    row[0] = csvio::format_number(p.eta);
    row[8] = status_token(p.status);
    if (p.status != spectrum::SolveStatus::Infeasible) {
      row[1] = csvio::format_number(p.capacity);
      row[2] = csvio::format_number(p.g_s);
      row[3] = csvio::format_number(p.g_l);
      if (p.L) row[4] = csvio::format_number(*p.L);
      if (p.lambda) row[5] = csvio::format_number(*p.lambda);
      if (p.mu) row[6] = csvio::format_number(*p.mu);
      row[7] = csvio::format_number(p.p_out);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

csvio::Table psd_table(const RunConfig& cfg, const pareto::ParetoPoint& pt) {
  if (pt.status == spectrum::SolveStatus::Infeasible)
    throw std::runtime_error("no spectrum for an infeasible point");
  const auto& tc = cfg.trace;
  const auto grid =
      circuit::FrequencyGrid::symmetric(tc.grid_omega_max, tc.grid_samples);
  csvio::Table t;
  t.columns = {"omega", "phi_s"};
  const bool uniform = tc.scenario != pareto::Scenario::PsdAndTerminations;
  if (!uniform && !pt.spectral)
    throw std::runtime_error("point carries no solved spectrum");
  const double level = tc.P / tc.omega_B;
  const double half_band = tc.omega_B / 2.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid.samples[i];
    const double phi = uniform
                           ? (std::abs(w) <= half_band ? level : 0.0)
                           : pt.spectral->psd[i];
    t.rows.push_back({csvio::format_number(w), csvio::format_number(phi)});
  }
  return t;
}

TraceOutcome run_trace(const RunConfig& cfg) {
  cfg.params.validate();
  cfg.trace.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const std::string pareto_path = cfg.out_dir + "/pareto.csv";
  auto pareto_out = open_out(pareto_path);  // fail early, before computing

  TraceOutcome outcome;
  outcome.points = pareto::trace_pareto(cfg.trace, cfg.params);
  for (const auto& p : outcome.points)
    if (p.status == spectrum::SolveStatus::Infeasible)
      outcome.any_infeasible = true;

  const auto table = pareto_table(outcome.points);
  pareto_out << csvio::to_csv(table);
  if (!pareto_out) throw std::runtime_error("write failed: " + pareto_path);
  pareto_out.close();
  outcome.files_written.push_back(pareto_path);

  // PSD tables: reuse a traced point when the eta matches, otherwise solve
  // that eta on its own. Infeasible requests are skipped.
  std::vector<std::pair<double, csvio::Table>> psd_tables;
  for (double eta : cfg.psd_eta) {
    const pareto::ParetoPoint* hit = nullptr;
    for (const auto& p : outcome.points)
      if (p.eta == eta) {
        hit = &p;
        break;
      }
    pareto::ParetoPoint fresh;
    if (!hit) {
      fresh = solve_point(cfg, eta);
      hit = &fresh;
    }
    if (hit->status == spectrum::SolveStatus::Infeasible) continue;
    psd_tables.emplace_back(eta, psd_table(cfg, *hit));
  }
  for (const auto& [eta, t] : psd_tables) {
    const std::string path = cfg.out_dir + "/" + psd_filename(eta);
    csvio::write_csv(path, t);
    outcome.files_written.push_back(path);
  }

  write_meta(cfg, outcome.files_written);

  if (cfg.emit_svg) {
    const auto reread = csvio::read_csv(pareto_path);
    const auto curve = series_from_table(reread, "eta", "capacity", "");
    const std::string sc = scenario_token(cfg.trace.scenario);
    const std::string svg_path = cfg.out_dir + "/pareto.svg";
    write_text(svg_path,
               svg::line_plot("capacity vs power transfer (scenario " + sc +
                                  ")",
                              "power-transfer factor eta",
                              "capacity (normalized)", {curve}));
    outcome.files_written.push_back(svg_path);
    if (!psd_tables.empty()) {
      std::vector<svg::Series> all;
      for (const auto& [eta, t_] : psd_tables) {
        const auto t = csvio::read_csv(cfg.out_dir + "/" + psd_filename(eta));
        char lbl[32];
        std::snprintf(lbl, sizeof lbl, "eta=%.6g", eta);
        all.push_back(series_from_table(t, "omega", "phi_s", lbl));
      }
      const std::string psd_svg = cfg.out_dir + "/psd.svg";
      write_text(psd_svg, svg::line_plot("input PSD", "omega (normalized)",
                                         "phi_s (normalized)", all));
      outcome.files_written.push_back(psd_svg);
    }
  }
  return outcome;
}

std::vector<std::string> run_psd(const RunConfig& cfg) {
  cfg.params.validate();
  cfg.trace.validate();
  if (cfg.psd_eta.empty())
    throw ConfigError("\"psd_eta\" must be non-empty for the psd command");
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<std::string> files;
  std::vector<svg::Series> all;
  for (double eta : cfg.psd_eta) {
    const auto pt = solve_point(cfg, eta);
    if (pt.status == spectrum::SolveStatus::Infeasible) continue;
    const auto t = psd_table(cfg, pt);
    const std::string path = cfg.out_dir + "/" + psd_filename(eta);
    csvio::write_csv(path, t);
    files.push_back(path);
    if (cfg.emit_svg) {
      char lbl[32];
      std::snprintf(lbl, sizeof lbl, "eta=%.6g", eta);
      all.push_back(series_from_table(t, "omega", "phi_s", lbl));
    }
  }
  write_meta(cfg, files);
  if (cfg.emit_svg && !all.empty()) {
    const std::string path = cfg.out_dir + "/psd.svg";
    write_text(path, svg::line_plot("input PSD", "omega (normalized)",
                                    "phi_s (normalized)", all));
    files.push_back(path);
  }
  return files;
}

std::vector<std::string> run_gain_profile(const RunConfig& cfg) {
  cfg.params.validate();
  if (!cfg.terminations)
    throw ConfigError(
        "\"terminations\" must be present for the gain-profile command");
  cfg.terminations->validate();
  std::filesystem::create_directories(cfg.out_dir);
  const auto grid = circuit::FrequencyGrid::symmetric(
      cfg.trace.grid_omega_max, cfg.trace.grid_samples);
  const auto prof = circuit::gain_profile(cfg.params, *cfg.terminations, grid);
  csvio::Table t;
  t.columns = {"omega", "gain"};
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.rows.push_back({csvio::format_number(grid.samples[i]),
                      csvio::format_number(prof.values[i])});
  std::vector<std::string> files;
  const std::string path = cfg.out_dir + "/gain_profile.csv";
  csvio::write_csv(path, t);
  files.push_back(path);
  write_meta(cfg, files);
  if (cfg.emit_svg) {
    const auto s = series_from_table(t, "omega", "gain", "");
    const std::string svg_path = cfg.out_dir + "/gain_profile.svg";
    write_text(svg_path, svg::line_plot("power gain", "omega (normalized)",
                                        "G (normalized)", {s}));
    files.push_back(svg_path);
  }
  return files;
}

}  // namespace gaincap::shell
