#include "gaincap/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>

#include "gaincap/optim.hpp"

namespace gaincap::shell {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
  throw ConfigError("\"" + key + "\" " + what);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& scope) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& k = it.key();
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return k == a;
        }) == allowed.end()) {
      const std::string where = scope.empty() ? k : scope + "." + k;
      throw ConfigError("unknown config key \"" + where + "\"");
    }
  }
}

double number_at(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) bad_key(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad_key(key, "must be finite");
  return x;
}

double positive_at(const json& obj, const std::string& key) {
  const double x = number_at(obj, key);
  if (!(x > 0.0)) bad_key(key, "must be positive");
  return x;
}

double nonnegative_at(const json& obj, const std::string& key) {
  const double x = number_at(obj, key);
  if (x < 0.0) bad_key(key, "must be nonnegative");
  return x;
}

long integer_at(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad_key(key, "must be an integer");
  return v.get<long>();
}

std::string string_at(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_string()) bad_key(key, "must be a string");
  return v.get<std::string>();
}

pareto::Bounds bounds_at(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    bad_key(key, "must be a pair [lo, hi]");
  pareto::Bounds b{v[0].get<double>(), v[1].get<double>()};
  if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo > 0.0) ||
      !(b.hi > b.lo))
    bad_key(key, "must be an ordered positive pair [lo, hi]");
  return b;
}

std::vector<double> eta_array_at(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_array()) bad_key(key, "must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) bad_key(key, "must be an array of numbers");
    const double x = e.get<double>();
    if (!std::isfinite(x) || x < 0.0)
      bad_key(key, "entries must be finite and nonnegative");
    out.push_back(x);
  }
  return out;
}

// Physical parameter group. Everything is normalized onto g_m = C_gd = N0 = 1
// and the scales kept so outputs can be mapped back.
void apply_physical(const json& phys, RunConfig& cfg) {
  check_keys(phys, {"g_m", "C_gd", "N0", "P", "g_d", "g_o", "omega_B"},
             "physical");
  for (const char* req : {"g_m", "C_gd", "N0", "P", "g_d"})
    if (!phys.contains(req))
      throw ConfigError("\"physical\" requires key \"" + std::string(req) +
                        "\"");
  cfg.norm.g_m = positive_at(phys, "g_m");
  cfg.norm.C_gd = positive_at(phys, "C_gd");
  cfg.norm.N0 = positive_at(phys, "N0");
  cfg.params.g_d = nonnegative_at(phys, "g_d") / cfg.norm.g_m;
  cfg.params.g_o = phys.contains("g_o")
                       ? nonnegative_at(phys, "g_o") / cfg.norm.g_m
                       : cfg.params.g_d;
  const double freq_scale = cfg.norm.g_m / cfg.norm.C_gd;
  cfg.trace.P = positive_at(phys, "P") / (cfg.norm.N0 * freq_scale);
  cfg.trace.omega_B = phys.contains("omega_B")
                          ? positive_at(phys, "omega_B") / freq_scale
                          : 0.1;
}

std::vector<double> default_eta_grid(const RunConfig& cfg) {
  double ceiling = pareto::eta_max(cfg.trace.scenario, cfg.params, cfg.trace);
  if (cfg.trace.scenario == pareto::Scenario::PsdAndTerminations) {
    // The box supremum is a narrowband limit the sample grid cannot hold, so
    // cap the default grid at what is reachable on the configured grid.
    ceiling = std::min(ceiling, pareto::eta_max_on_grid(cfg.params, cfg.trace));
  }
  const double hi = 0.98 * ceiling;
  std::vector<double> grid{0.0};
  const auto tail = optim::log_grid(hi / 100.0, hi, 49);
  grid.insert(grid.end(), tail.begin(), tail.end());
  return grid;
}

}  // namespace

std::string scenario_token(pareto::Scenario s) {
  switch (s) {
    case pareto::Scenario::PsdAndTerminations: return "A";
    case pareto::Scenario::UniformPsd: return "B";
    case pareto::Scenario::UniformPsdMatched: return "BL";
  }
  throw std::logic_error("unreachable scenario");
}

pareto::Scenario scenario_from_token(const std::string& tok) {
  if (tok == "A") return pareto::Scenario::PsdAndTerminations;
  if (tok == "B") return pareto::Scenario::UniformPsd;
  if (tok == "BL") return pareto::Scenario::UniformPsdMatched;
  throw ConfigError("\"scenario\" must be \"A\", \"B\", or \"BL\"");
}

std::string placement_token(circuit::MatchingPlacement p) {
  switch (p) {
    case circuit::MatchingPlacement::ParallelToCgd: return "parallel_cgd";
    case circuit::MatchingPlacement::ShuntInput: return "shunt_input";
    case circuit::MatchingPlacement::ShuntOutput: return "shunt_output";
  }
  throw std::logic_error("unreachable placement");
}

circuit::MatchingPlacement placement_from_token(const std::string& tok) {
  if (tok == "parallel_cgd") return circuit::MatchingPlacement::ParallelToCgd;
  if (tok == "shunt_input") return circuit::MatchingPlacement::ShuntInput;
  if (tok == "shunt_output") return circuit::MatchingPlacement::ShuntOutput;
  throw ConfigError(
      "\"matching_placement\" must be \"parallel_cgd\", \"shunt_input\", or "
      "\"shunt_output\"");
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(doc,
             {"scenario", "g_d_over_gm", "g_o_over_gm", "P_norm",
              "omega_B_norm", "physical", "eta_grid", "psd_eta", "g_s_bounds",
              "g_l_bounds", "L_bounds", "multistart", "tol", "grid",
              "matching_placement", "terminations", "out_dir", "emit_svg"},
             "");

  RunConfig cfg;
  cfg.trace.scenario = scenario_from_token(
      doc.contains("scenario") ? string_at(doc, "scenario") : "A");

  if (doc.contains("physical")) {
    for (const char* k : {"g_d_over_gm", "g_o_over_gm", "P_norm", "omega_B_norm"})
      if (doc.contains(k))
        throw ConfigError("\"" + std::string(k) +
                          "\" conflicts with the \"physical\" group");
    if (!doc.at("physical").is_object())
      bad_key("physical", "must be an object");
    apply_physical(doc.at("physical"), cfg);
  } else {
    cfg.params.g_d =
        doc.contains("g_d_over_gm") ? nonnegative_at(doc, "g_d_over_gm") : 0.1;
    cfg.params.g_o = doc.contains("g_o_over_gm")
                         ? nonnegative_at(doc, "g_o_over_gm")
                         : cfg.params.g_d;
    cfg.trace.P = doc.contains("P_norm") ? positive_at(doc, "P_norm") : 0.1;
    cfg.trace.omega_B =
        doc.contains("omega_B_norm") ? positive_at(doc, "omega_B_norm") : 0.1;
  }
  cfg.params.g_m = 1.0;
  cfg.params.C_gd = 1.0;
  cfg.params.N0 = 1.0;

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    if (!g.is_object()) bad_key("grid", "must be an object");
    check_keys(g, {"omega_max", "samples"}, "grid");
    if (g.contains("omega_max"))
      cfg.trace.grid_omega_max = positive_at(g, "omega_max");
    if (g.contains("samples")) {
      const long n = integer_at(g, "samples");
      if (n < 16 || n > (1L << 22))
        bad_key("grid.samples", "must be in [16, 4194304]");
      cfg.trace.grid_samples = static_cast<std::size_t>(n);
    }
  }
  if (doc.contains("g_s_bounds"))
    cfg.trace.g_s_bounds = bounds_at(doc, "g_s_bounds");
  if (doc.contains("g_l_bounds"))
    cfg.trace.g_l_bounds = bounds_at(doc, "g_l_bounds");
  if (doc.contains("L_bounds")) cfg.trace.L_bounds = bounds_at(doc, "L_bounds");
  if (doc.contains("multistart")) {
    const long m = integer_at(doc, "multistart");
    if (m < 1 || m > 20) bad_key("multistart", "must be in [1, 20]");
    cfg.trace.multistart = static_cast<int>(m);
  }
  if (doc.contains("tol")) cfg.trace.tol = positive_at(doc, "tol");
  if (doc.contains("matching_placement"))
    cfg.trace.placement =
        placement_from_token(string_at(doc, "matching_placement"));
  if (doc.contains("psd_eta")) cfg.psd_eta = eta_array_at(doc, "psd_eta");
  if (doc.contains("terminations")) {
    const json& t = doc.at("terminations");
    if (!t.is_object()) bad_key("terminations", "must be an object");
    check_keys(t, {"g_s", "g_l", "L"}, "terminations");
    for (const char* req : {"g_s", "g_l"})
      if (!t.contains(req))
        throw ConfigError("\"terminations\" requires key \"" +
                          std::string(req) + "\"");
    circuit::Termination term;
    term.g_s = positive_at(t, "g_s");
    term.g_l = positive_at(t, "g_l");
    if (t.contains("L"))
      term.matching =
          circuit::Matching{positive_at(t, "L"), cfg.trace.placement};
    cfg.terminations = term;
  }
  if (doc.contains("out_dir")) {
    cfg.out_dir = string_at(doc, "out_dir");
    if (cfg.out_dir.empty()) bad_key("out_dir", "must not be empty");
  }
  if (doc.contains("emit_svg")) {
    const json& v = doc.at("emit_svg");
    if (!v.is_boolean()) bad_key("emit_svg", "must be a boolean");
    cfg.emit_svg = v.get<bool>();
  }

  // Validate everything that does not depend on eta_grid, then either take
  // the user's grid or build the default one (which needs valid settings).
  cfg.trace.eta_grid = {0.0};
  try {
    cfg.params.validate();
    cfg.trace.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (doc.contains("eta_grid")) {
    cfg.trace.eta_grid = eta_array_at(doc, "eta_grid");
    try {
      cfg.trace.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else {
    cfg.trace.eta_grid = default_eta_grid(cfg);
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json doc;
  doc["scenario"] = scenario_token(cfg.trace.scenario);
  doc["g_d_over_gm"] = cfg.params.g_d;
  doc["g_o_over_gm"] = cfg.params.g_o;
  doc["P_norm"] = cfg.trace.P;
  doc["omega_B_norm"] = cfg.trace.omega_B;
  doc["eta_grid"] = cfg.trace.eta_grid;
  doc["psd_eta"] = cfg.psd_eta;
  doc["g_s_bounds"] = {cfg.trace.g_s_bounds.lo, cfg.trace.g_s_bounds.hi};
  doc["g_l_bounds"] = {cfg.trace.g_l_bounds.lo, cfg.trace.g_l_bounds.hi};
  doc["L_bounds"] = {cfg.trace.L_bounds.lo, cfg.trace.L_bounds.hi};
  doc["multistart"] = cfg.trace.multistart;
  doc["tol"] = cfg.trace.tol;
  doc["grid"] = {{"omega_max", cfg.trace.grid_omega_max},
                 {"samples", cfg.trace.grid_samples}};
  doc["matching_placement"] = placement_token(cfg.trace.placement);
  if (cfg.terminations) {
    json t;
    t["g_s"] = cfg.terminations->g_s;
    t["g_l"] = cfg.terminations->g_l;
    if (cfg.terminations->matching) t["L"] = cfg.terminations->matching->L;
    doc["terminations"] = t;
  }
  doc["out_dir"] = cfg.out_dir;
  doc["emit_svg"] = cfg.emit_svg;
  return doc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(doc);
}

bool config_equal(const RunConfig& a, const RunConfig& b) {
  const auto& ta = a.trace;
  const auto& tb = b.trace;
  const bool term_eq = [&] {
    if (a.terminations.has_value() != b.terminations.has_value()) return false;
    if (!a.terminations) return true;
    const auto& x = *a.terminations;
    const auto& y = *b.terminations;
    if (x.g_s != y.g_s || x.g_l != y.g_l) return false;
    if (x.matching.has_value() != y.matching.has_value()) return false;
    return !x.matching || (x.matching->L == y.matching->L &&
                           x.matching->placement == y.matching->placement);
  }();
  return a.params.g_d == b.params.g_d && a.params.g_o == b.params.g_o &&
         ta.scenario == tb.scenario && ta.eta_grid == tb.eta_grid &&
         ta.P == tb.P && ta.omega_B == tb.omega_B &&
         ta.g_s_bounds.lo == tb.g_s_bounds.lo &&
         ta.g_s_bounds.hi == tb.g_s_bounds.hi &&
         ta.g_l_bounds.lo == tb.g_l_bounds.lo &&
         ta.g_l_bounds.hi == tb.g_l_bounds.hi &&
         ta.L_bounds.lo == tb.L_bounds.lo &&
         ta.L_bounds.hi == tb.L_bounds.hi &&
         ta.multistart == tb.multistart && ta.tol == tb.tol &&
         ta.grid_omega_max == tb.grid_omega_max &&
         ta.grid_samples == tb.grid_samples &&
         ta.placement == tb.placement && a.psd_eta == b.psd_eta &&
         term_eq && a.out_dir == b.out_dir && a.emit_svg == b.emit_svg;
}

}  // namespace gaincap::shell
