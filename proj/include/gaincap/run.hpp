#pragma once

#include <string>
#include <vector>

#include "gaincap/config.hpp"
#include "gaincap/csvio.hpp"
#include "gaincap/pareto.hpp"

namespace gaincap::shell {

struct TraceOutcome {
  std::vector<pareto::ParetoPoint> points;
  bool any_infeasible = false;
  std::vector<std::string> files_written;
};

// Full trace: pareto.csv, psd_<eta>.csv for each entry of cfg.psd_eta,
// meta.json, and (with emit_svg) SVG renderings of everything written.
// Output paths are checked for writability before any computation starts.
TraceOutcome run_trace(const RunConfig& cfg);

// PSD tables only, for cfg.psd_eta (must be non-empty).
std::vector<std::string> run_psd(const RunConfig& cfg);

// Gain profile of cfg.terminations (must be present) on the trace grid.
std::vector<std::string> run_gain_profile(const RunConfig& cfg);

// Row layout shared by run_trace and the tests. Infeasible points keep only
// eta and status; the L cell is empty whenever no inductor is part of the
// solution.
csvio::Table pareto_table(const std::vector<pareto::ParetoPoint>& points);

// (omega, phi_s) table for one solved point. Scenario A reads the solved
// spectrum; uniform-PSD scenarios tabulate the rectangular spectrum on the
// same grid.
csvio::Table psd_table(const RunConfig& cfg, const pareto::ParetoPoint& pt);

std::string psd_filename(double eta);

}  // namespace gaincap::shell
