#include "smoothcontact/runner.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace smoothcontact {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> split_schema(const std::string& schema) {
  std::vector<std::string> out;
  std::stringstream in(schema);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(part);
  return out;
}

// "energy[J]" + "IPC" -> "energy_IPC[J]"
std::string suffix_column(const std::string& column, const std::string& tag) {
  const auto bracket = column.find('[');
  if (bracket == std::string::npos) return column + "_" + tag;
  return column.substr(0, bracket) + "_" + tag + column.substr(bracket);
}

std::filesystem::path write_table(const CsvTable& table, const std::filesystem::path& out_dir,
                                  const std::string& file_name) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = out_dir / file_name;
  table.write(path);
  return path;
}

// Diagnostic flags of the wall scan: work-energy consistency for every
// formulation, wall structure for IPC, flatness for IMLS.
void scan_flags(const Scenario& scenario, const std::vector<ScanRow>& rows, RunReport& report) {
  const int n = static_cast<int>(rows.size());
  double work = 0.0;  // integral of -f_t dx, trapezoid rule
  for (int i = 0; i + 1 < n; ++i)
    work += 0.5 * (-rows[i].tangential_force - rows[i + 1].tangential_force) *
            (rows[i + 1].x - rows[i].x);
  const double delta_e = rows[n - 1].energy - rows[0].energy;
  double e_max = rows[0].energy, e_min = rows[0].energy;
  double ft_max = 0.0, fn_sum = 0.0;
  for (const ScanRow& r : rows) {
    e_max = std::max(e_max, r.energy);
    e_min = std::min(e_min, r.energy);
    ft_max = std::max(ft_max, std::abs(r.tangential_force));
    fn_sum += std::abs(r.normal_force);
  }
  const double fn_mean = fn_sum / n;
  report.metrics["work_integral"] = work;
  report.metrics["energy_delta"] = delta_e;
  report.flags["work_energy_consistent"] =
      std::abs(work - delta_e) <= 1e-3 * std::max(std::abs(delta_e), 1e-6 * std::abs(e_max));
  report.metrics["tangential_max"] = ft_max;
  report.metrics["normal_mean"] = fn_mean;

  if (scenario.formulation.kind == ContactKind::IMLS) {
    report.flags["flat_profile"] = ft_max < 1e-6 * fn_mean;
  }
  if (scenario.formulation.kind == ContactKind::IPC) {
    const double dx = rows[1].x - rows[0].x;
    const double seg = scenario.scan.segment_length;
    bool maxima_at_vertices = true;
    int maxima = 0;
    for (int i = 1; i + 1 < n; ++i) {
      if (rows[i].energy > rows[i - 1].energy && rows[i].energy > rows[i + 1].energy) {
        ++maxima;
        const double nearest = std::round(rows[i].x / seg) * seg;
        if (std::abs(rows[i].x - nearest) > dx) maxima_at_vertices = false;
      }
    }
    report.metrics["energy_ratio"] = e_min > 0 ? e_max / e_min : 0.0;
    report.metrics["maxima_count"] = maxima;
    report.flags["walls"] =
        maxima > 0 && maxima_at_vertices && e_min > 0 && e_max / e_min > 1.5;
  }
}

void block_flags(const Scenario& scenario, const SlidingBlockResult& run, RunReport& report) {
  const auto& b = scenario.block;
  const int n = static_cast<int>(run.centroid.size());
  const double final_disp = run.centroid.back().x() - run.start_centroid.x();
  const double mid_disp = run.centroid[n / 2 - 1].x() - run.start_centroid.x();
  const double last_half = final_disp - mid_disp;
  const double t = run.time.back();
  const double free_slide = 0.5 * (b.lateral_force / run.block_mass) * t * t;
  report.metrics["displacement"] = final_disp;
  report.metrics["free_slide"] = free_slide;
  report.metrics["block_mass"] = run.block_mass;
  if (b.lateral_force != 0) {
    report.metrics["slide_rel_err"] = std::abs(final_disp - free_slide) / free_slide;
    report.flags["matches_free_slide"] = report.metrics["slide_rel_err"] < 0.2;
    report.flags["halted"] = std::abs(last_half) < 0.05 * std::abs(mid_disp);
  }
  report.flags["all_steps_converged"] = run.failed_step < 0;
}

}  // namespace

CsvTable scan_table(const std::vector<ScanRow>& rows) {
  CsvTable table;
  table.schema = "x[m],energy[J],f_t[N],f_n[N]";
  for (const ScanRow& r : rows)
    table.rows.push_back({r.x, r.energy, r.tangential_force, r.normal_force});
  return table;
}

std::string RunReport::to_json_line() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["experiment"] = experiment;
  j["formulation"] = formulation;
  j["wall_clock_s"] = wall_clock_s;
  j["newton_iterations"] = newton_iterations;
  j["newton_iterations_per_step"] = newton_iterations_per_step;
  j["flags"] = flags;
  j["metrics"] = metrics;
  j["outputs"] = outputs;
  return j.dump();
}

RunReport run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                       std::ostream* verbose) {
  scenario.validate();
  RunReport report;
  report.scenario = scenario.name;
  report.experiment = scenario.experiment;
  report.formulation = to_string(scenario.formulation.kind);
  const std::string file_name = scenario.name + "_" + report.formulation + ".csv";
  const auto start = Clock::now();

  CsvTable table;
  if (scenario.experiment == "energy_wall_scan") {
    const std::vector<ScanRow> rows = energy_wall_scan(scenario);
    table = scan_table(rows);
    scan_flags(scenario, rows, report);
  } else if (scenario.experiment == "sliding_block") {
    const SlidingBlockResult run = sliding_block(scenario, verbose);
    table.schema = "t[s],cx[m],cy[m]";
    std::ostringstream kappa;
    kappa.precision(17);
    kappa << "kappa=" << scenario.formulation.barrier.kappa
          << " d_hat=" << scenario.formulation.barrier.d_hat;
    table.comments.push_back(kappa.str());
    for (std::size_t i = 0; i < run.time.size(); ++i)
      table.rows.push_back({run.time[i], run.centroid[i].x(), run.centroid[i].y()});
    report.newton_iterations = run.newton_iterations;
    report.newton_iterations_per_step =
        double(run.newton_iterations) / (scenario.block.steps + scenario.block.settle_steps);
    block_flags(scenario, run, report);
  } else if (scenario.experiment == "annulus_forward") {
    const AnnulusForwardResult run = annulus_forward(scenario, verbose);
    table.schema = "theta_b[rad],theta_a[rad]";
    for (std::size_t i = 0; i < run.theta_b.size(); ++i)
      table.rows.push_back({run.theta_b[i], run.theta_a[i]});
    report.metrics["max_error"] = run.max_error;
    report.flags["tracks_ground_truth"] = run.max_error < 1e-2;
  } else {  // annulus_inverse
    const InverseResult run = annulus_inverse(scenario, verbose);
    table.schema = "step,objective[m^2]";
    for (std::size_t i = 0; i < run.objective_trajectory.size(); ++i)
      table.rows.push_back({double(i), run.objective_trajectory[i]});
    report.metrics["final_objective"] = run.objective_trajectory.back();
    report.metrics["steps"] = run.steps;
    report.metrics["theta_b"] = run.theta_b;
    report.metrics["theta_a"] = run.theta_a;
    report.flags["converged"] = run.converged;
  }

  report.outputs.push_back(write_table(table, out_dir, file_name).string());
  report.wall_clock_s = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

std::vector<RunReport> compare_scenario(const Scenario& scenario,
                                        const std::vector<ContactKind>& kinds,
                                        const std::filesystem::path& out_dir,
                                        std::ostream* verbose) {
  if (kinds.empty()) throw ConfigError("empty formulation list");
  std::vector<RunReport> reports;
  for (const ContactKind kind : kinds) {
    Scenario variant = scenario;
    variant.formulation.kind = kind;
    variant.validate();
    reports.push_back(run_scenario(variant, out_dir, verbose));
  }
  // Merge on the shared abscissa: re-load the per-formulation CSVs.
  std::vector<CsvTable> loaded;
  for (const RunReport& r : reports) loaded.push_back(CsvTable::read(r.outputs.front()));

  std::size_t rows = loaded.front().rows.size();
  for (const CsvTable& t : loaded) rows = std::min(rows, t.rows.size());
  CsvTable merged;
  const std::vector<std::string> base_cols = split_schema(loaded.front().schema);
  merged.schema = base_cols.front();
  for (std::size_t k = 0; k < loaded.size(); ++k) {
    const std::vector<std::string> cols = split_schema(loaded[k].schema);
    for (std::size_t c = 1; c < cols.size(); ++c)
      merged.schema += "," + suffix_column(cols[c], to_string(kinds[k]));
  }
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row{loaded.front().rows[i][0]};
    for (std::size_t k = 0; k < loaded.size(); ++k) {
      if (std::abs(loaded[k].rows[i][0] - row[0]) > 1e-12)
        throw ConfigError("compare: abscissae differ across formulations");
      for (std::size_t c = 1; c < loaded[k].rows[i].size(); ++c)
        row.push_back(loaded[k].rows[i][c]);
    }
    merged.rows.push_back(row);
  }
  const auto merged_path = write_table(merged, out_dir, scenario.name + "_compare.csv");
  for (RunReport& r : reports) r.outputs.push_back(merged_path.string());
  return reports;
}

}  // namespace smoothcontact
