#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gaincap/circuit.hpp"
#include "gaincap/pareto.hpp"

namespace gaincap::shell {

// Raised for any problem with a config document: parse failure, unknown or
// ill-typed key, out-of-range value. The message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scale factors that map a physical parameter set onto the normalized one
// used internally (conductances in units of g_m, frequency in units of
// g_m/C_gd, power in units of N0*g_m/C_gd). Identity when the config was
// already normalized.
struct Normalization {
  double g_m = 1.0;
  double C_gd = 1.0;
  double N0 = 1.0;
};

struct RunConfig {
  circuit::CircuitParams params;  // normalized on ingestion
  pareto::TraceConfig trace;
  std::vector<double> psd_eta;  // eta values that get a PSD table
  std::optional<circuit::Termination> terminations;  // for gain-profile
  std::string out_dir = "out";
  bool emit_svg = false;
  Normalization norm;
};

std::string scenario_token(pareto::Scenario s);
pareto::Scenario scenario_from_token(const std::string& tok);
std::string placement_token(circuit::MatchingPlacement p);
circuit::MatchingPlacement placement_from_token(const std::string& tok);

// Parses and validates a config document. Missing keys get defaults; the
// default eta_grid is {0} plus 49 log-spaced points up to 0.98 of the
// scenario's transfer ceiling. Physical parameters (under "physical") are
// normalized and the scales recorded.
RunConfig config_from_json(const nlohmann::json& doc);

// Fully explicit normalized form. Feeding it back through config_from_json
// reproduces the same RunConfig (norm resets to identity).
nlohmann::json config_to_json(const RunConfig& cfg);

RunConfig load_config(const std::string& path);

// Field-wise equality of the normalized content (norm excluded).
bool config_equal(const RunConfig& a, const RunConfig& b);

}  // namespace gaincap::shell
