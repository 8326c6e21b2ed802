#pragma once

#include <map>
#include <ostream>

#include "smoothcontact/experiments.hpp"
#include "smoothcontact/io.hpp"

namespace smoothcontact {

// Outcome of one scenario execution: timing, solver effort, per-experiment
// pass/fail flags and metrics, and the files written.
struct RunReport {
  std::string scenario;
  std::string experiment;
  std::string formulation;
  double wall_clock_s = 0.0;
  int newton_iterations = 0;
  double newton_iterations_per_step = 0.0;
  std::map<std::string, bool> flags;
  std::map<std::string, double> metrics;
  std::vector<std::string> outputs;

  std::string to_json_line() const;
};

// Executes the scenario's experiment, writes its CSV outputs into out_dir
// (created if missing), and evaluates the experiment's diagnostic flags.
// `verbose`, when non-null, receives per-iteration solver CSV.
RunReport run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                       std::ostream* verbose = nullptr);

// Runs the scenario once per formulation kind and merges the per-formulation
// CSVs on the shared abscissa column into "<name>_compare.csv".
std::vector<RunReport> compare_scenario(const Scenario& scenario,
                                        const std::vector<ContactKind>& kinds,
                                        const std::filesystem::path& out_dir,
                                        std::ostream* verbose = nullptr);

// The scan table produced by run_scenario, exposed for flag evaluation.
CsvTable scan_table(const std::vector<ScanRow>& rows);

}  // namespace smoothcontact
