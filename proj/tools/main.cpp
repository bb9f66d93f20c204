#include <cstdio>
#include <fstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaincap/config.hpp"
#include "gaincap/run.hpp"
#include "gaincap/verify.hpp"
#include "gaincap/version.hpp"

namespace {

nlohmann::json read_document(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in)
    throw gaincap::shell::ConfigError("cannot open config file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw gaincap::shell::ConfigError("config parse error in " + path + ": " +
                                      e.what());
  }
}

void print_files(const std::vector<std::string>& files) {
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto trade-off between channel capacity and power transfer "
               "for a two-port amplifier"};
  app.set_version_flag("--version", std::string(gaincap::version_string));
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string scenario;
  bool strict = false;
  bool quick = false;
  bool emit_svg = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--scenario", scenario, "scenario override: A, B, or BL")
      ->check(CLI::IsMember({"A", "B", "BL"}));
  app.add_flag("--strict", strict,
               "exit nonzero when any trace point is infeasible");
  app.add_flag("--quick", quick, "reduced resolutions for verify");
  app.add_flag("--emit-svg", emit_svg, "also render SVG plots");

  auto* cmd_trace = app.add_subcommand(
      "trace", "sweep the eta grid and write the capacity frontier");
  auto* cmd_psd =
      app.add_subcommand("psd", "write solved PSD tables for psd_eta");
  auto* cmd_gain = app.add_subcommand(
      "gain-profile", "tabulate the power gain of fixed terminations");
  auto* cmd_verify = app.add_subcommand(
      "verify", "cross-check the independent computation routes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    nlohmann::json doc = read_document(config_path);
    if (!doc.is_object())
      throw gaincap::shell::ConfigError("config root must be a JSON object");
    if (!scenario.empty()) doc["scenario"] = scenario;
    if (!out_dir.empty()) doc["out_dir"] = out_dir;
    if (emit_svg) doc["emit_svg"] = true;
    const auto cfg = gaincap::shell::config_from_json(doc);

    if (*cmd_trace) {
      const auto outcome = gaincap::shell::run_trace(cfg);
      print_files(outcome.files_written);
      std::size_t infeasible = 0;
      for (const auto& p : outcome.points)
        if (p.status == gaincap::spectrum::SolveStatus::Infeasible)
          ++infeasible;
      std::printf("%zu points, %zu infeasible\n", outcome.points.size(),
                  infeasible);
      if (strict && outcome.any_infeasible) {
        std::fprintf(stderr, "strict mode: infeasible points present\n");
        return 1;
      }
      return 0;
    }
    if (*cmd_psd) {
      print_files(gaincap::shell::run_psd(cfg));
      return 0;
    }
    if (*cmd_gain) {
      print_files(gaincap::shell::run_gain_profile(cfg));
      return 0;
    }
    if (*cmd_verify) {
      const auto report = gaincap::shell::run_verify(cfg, quick);
      for (const auto& c : report.checks)
        std::printf("[%s] %-28s worst %.3e  tol %.1e\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.worst, c.tol);
      if (!report.all_pass()) {
        std::fprintf(stderr, "verification failed\n");
        return 3;
      }
      std::printf("all checks passed\n");
      return 0;
    }
  } catch (const gaincap::shell::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
