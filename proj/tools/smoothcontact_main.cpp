#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "smoothcontact/runner.hpp"

namespace {

using namespace smoothcontact;

std::filesystem::path resolve_out_dir(const std::string& flag_value) {
  if (const char* env = std::getenv("SMOOTHCONTACT_OUT"); env && *env) return env;
  return flag_value.empty() ? "." : flag_value;
}

Scenario load_with_overrides(const std::string& path, const std::vector<std::string>& overrides) {
  Scenario scenario = load_scenario(path);
  for (const std::string& o : overrides) apply_override(scenario, o);
  return scenario;
}

std::vector<ContactKind> parse_kinds(const std::string& csv) {
  std::vector<ContactKind> kinds;
  std::stringstream in(csv);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) kinds.push_back(contact_kind_from_string(token));
  }
  if (kinds.empty()) throw ConfigError("empty formulation list");
  return kinds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D deformable contact toolkit: scenario runner"};
  app.require_subcommand(1);

  std::string out_dir_flag;
  bool verbose = false;
  app.add_option("--out-dir", out_dir_flag, "Output directory (env SMOOTHCONTACT_OUT overrides)");
  app.add_flag("--verbose", verbose, "Per-iteration solver CSV on stderr");

  std::string run_path;
  std::vector<std::string> run_overrides;
  CLI::App* run_cmd = app.add_subcommand("run", "Execute one scenario");
  run_cmd->add_option("scenario", run_path, "Scenario file")->required();
  run_cmd->add_option("overrides", run_overrides, "section.key=value overrides");

  std::string cmp_path;
  std::string cmp_formulations;
  std::vector<std::string> cmp_overrides;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Run one scenario per formulation and merge");
  cmp_cmd->add_option("scenario", cmp_path, "Scenario file")->required();
  cmp_cmd->add_option("--formulations", cmp_formulations, "Comma-separated kinds (NTS,IPC,IMLS)")
      ->required();
  cmp_cmd->add_option("overrides", cmp_overrides, "section.key=value overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::filesystem::path out_dir = resolve_out_dir(out_dir_flag);
  std::ostream* solver_log = verbose ? &std::cerr : nullptr;
  try {
    if (run_cmd->parsed()) {
      const Scenario scenario = load_with_overrides(run_path, run_overrides);
      const RunReport report = run_scenario(scenario, out_dir, solver_log);
      std::cout << report.to_json_line() << "\n";
    } else {
      const Scenario scenario = load_with_overrides(cmp_path, cmp_overrides);
      const std::vector<ContactKind> kinds = parse_kinds(cmp_formulations);
      for (const RunReport& report : compare_scenario(scenario, kinds, out_dir, solver_log))
        std::cout << report.to_json_line() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
