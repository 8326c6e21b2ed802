#include "smoothcontact/scenario.hpp"

#include <fstream>
#include <sstream>

#include "smoothcontact/elasticity.hpp"

namespace smoothcontact {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  throw ConfigError(context + ": " + message);
}

double parse_double(const std::string& value, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    fail(context, "expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& value, const std::string& context) {
  try {
    std::size_t pos = 0;
    const int i = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return i;
  } catch (const std::exception&) {
    fail(context, "expected an integer, got '" + value + "'");
  }
}

// Routes one section.key assignment into the scenario. `context` prefixes
// diagnostics ("file:line" or "override 'k=v'").
void set_key(Scenario& s, const std::string& section, const std::string& key,
             const std::string& value, const std::string& context) {
  auto num = [&] { return parse_double(value, context); };
  auto integer = [&] { return parse_int(value, context); };

  if (section == "scenario") {
    if (key == "name") {
      s.name = value;
    } else if (key == "experiment") {
      s.experiment = value;
    } else {
      fail(context, "unknown key 'scenario." + key + "'");
    }
  } else if (section == "formulation") {
    if (key == "kind") {
      try {
        s.formulation.kind = contact_kind_from_string(value);
      } catch (const ConfigError& e) {
        fail(context, e.what());
      }
    } else if (key == "d_hat") {
      s.formulation.barrier.d_hat = num();
    } else if (key == "kappa") {
      s.formulation.barrier.kappa = num();
    } else if (key == "R") {
      s.formulation.imls.R = num();
    } else if (key == "sigma_r") {
      s.formulation.imls.sigma_r = num();
    } else if (key == "sigma_n") {
      s.formulation.imls.sigma_n = num();
    } else if (key == "irls_iters") {
      s.formulation.imls.irls_iters = integer();
    } else {
      fail(context, "unknown key 'formulation." + key + "'");
    }
  } else if (section == "scan") {
    if (key == "segments") {
      s.scan.segments = integer();
    } else if (key == "segment_length") {
      s.scan.segment_length = num();
    } else if (key == "height") {
      s.scan.height = num();
    } else if (key == "n_samples") {
      s.scan.n_samples = integer();
    } else if (key == "margin") {
      s.scan.margin = num();
    } else {
      fail(context, "unknown key 'scan." + key + "'");
    }
  } else if (section == "block") {
    if (key == "size") {
      s.block.size = num();
    } else if (key == "density") {
      s.block.density = num();
    } else if (key == "youngs_modulus") {
      s.block.youngs_modulus = num();
    } else if (key == "poisson_ratio") {
      s.block.poisson_ratio = num();
    } else if (key == "gravity") {
      s.block.gravity = num();
    } else if (key == "lateral_force") {
      s.block.lateral_force = num();
    } else if (key == "steps") {
      s.block.steps = integer();
    } else if (key == "settle_steps") {
      s.block.settle_steps = integer();
    } else if (key == "h") {
      s.block.h = num();
    } else if (key == "settle_h") {
      s.block.settle_h = num();
    } else if (key == "start_x") {
      s.block.start_x = num();
    } else if (key == "gap") {
      s.block.gap = num();
    } else if (key == "floor_segments") {
      s.block.floor_segments = integer();
    } else if (key == "floor_segment_length") {
      s.block.floor_segment_length = num();
    } else {
      fail(context, "unknown key 'block." + key + "'");
    }
  } else if (section == "annulus") {
    if (key == "r1") {
      s.annulus.r1 = num();
    } else if (key == "r2") {
      s.annulus.r2 = num();
    } else if (key == "spring_stiffness") {
      s.annulus.spring_stiffness = num();
    } else if (key == "verts_per_quarter") {
      s.annulus.verts_per_quarter = integer();
    } else if (key == "track_gap") {
      s.annulus.track_gap = num();
    } else if (key == "samples") {
      s.annulus.samples = integer();
    } else if (key == "theta_min") {
      s.annulus.theta_min = num();
    } else if (key == "theta_max") {
      s.annulus.theta_max = num();
    } else if (key == "theta_b0") {
      s.annulus.theta_b0 = num();
    } else if (key == "target_theta_a") {
      s.annulus.target_theta_a = num();
    } else if (key == "lr") {
      s.annulus.lr = num();
    } else if (key == "max_steps") {
      s.annulus.max_steps = integer();
    } else if (key == "obj_tol") {
      s.annulus.obj_tol = num();
    } else {
      fail(context, "unknown key 'annulus." + key + "'");
    }
  } else {
    fail(context, "unknown section '" + section + "'");
  }
}

}  // namespace

void Scenario::validate() const {
  formulation.validate();
  if (experiment != "energy_wall_scan" && experiment != "sliding_block" &&
      experiment != "annulus_forward" && experiment != "annulus_inverse")
    throw ConfigError("unknown experiment '" + experiment + "'");
  if (experiment == "energy_wall_scan") {
    if (scan.segments < 1 || scan.segment_length <= 0 || scan.n_samples < 2 || scan.margin < 0)
      throw ConfigError("invalid scan parameters");
    if (!(0 < scan.height && scan.height < formulation.barrier.d_hat))
      throw ConfigError("scan height must lie in (0, d_hat)");
  } else if (experiment == "sliding_block") {
    if (block.size <= 0 || block.steps < 1 || block.settle_steps < 0 || block.h <= 0 || block.settle_h <= 0 ||
        block.floor_segments < 1 || block.floor_segment_length <= 0)
      throw ConfigError("invalid block parameters");
    if (!(0 < block.gap && block.gap < formulation.barrier.d_hat))
      throw ConfigError("block gap must lie in (0, d_hat)");
    Material m;
    m.youngs_modulus = block.youngs_modulus;
    m.poisson_ratio = block.poisson_ratio;
    m.density = block.density;
    m.validate();
  } else {
    if (!(0 < annulus.r1 && annulus.r1 < annulus.r2) || annulus.spring_stiffness <= 0 ||
        annulus.verts_per_quarter < 2)
      throw ConfigError("invalid annulus parameters");
    if (experiment == "annulus_forward" &&
        (annulus.samples < 1 || !(annulus.theta_min <= annulus.theta_max)))
      throw ConfigError("invalid annulus sweep");
    if (experiment == "annulus_inverse" &&
        (annulus.lr <= 0 || annulus.max_steps < 1 || annulus.obj_tol <= 0))
      throw ConfigError("invalid inverse design parameters");
  }
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Scenario scenario;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  bool has_experiment = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string context = source + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') fail(context, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(context, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(context, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(context, "empty key");
    if (section.empty()) fail(context, "key '" + key + "' outside any [section]");
    set_key(scenario, section, key, value, context);
    if (section == "scenario" && key == "experiment") has_experiment = true;
  }
  if (!has_experiment) throw ConfigError(source + ": missing 'scenario.experiment'");
  scenario.validate();
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.filename().string());
}

void apply_override(Scenario& scenario, const std::string& assignment) {
  const std::string context = "override '" + assignment + "'";
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) fail(context, "expected section.key=value");
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= path.size())
    fail(context, "expected a dotted section.key path");
  set_key(scenario, path.substr(0, dot), path.substr(dot + 1), value, context);
  scenario.validate();
}

}  // namespace smoothcontact
