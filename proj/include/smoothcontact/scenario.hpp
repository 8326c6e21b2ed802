#pragma once

#include <filesystem>
#include <string>

#include "smoothcontact/contact.hpp"

namespace smoothcontact {

// Declarative experiment description, parsed from "[section] / key = value"
// text files. Each experiment kind reads its own section; the [formulation]
// section selects and parameterizes the contact model.
struct Scenario {
  std::string name = "unnamed";
  // energy_wall_scan | sliding_block | annulus_forward | annulus_inverse
  std::string experiment;
  ContactFormulation formulation;

  struct Scan {
    int segments = 10;           // flat floor segment count
    double segment_length = 1.0;  // m
    double height = 0.01;         // probe height above the floor, in (0, d_hat)
    int n_samples = 601;
    double margin = 2.0;  // distance from the floor ends excluded from the scan
  } scan;

  struct Block {
    double size = 0.2;            // m, square side
    double density = 1000.0;      // kg/m^3
    double youngs_modulus = 1e6;  // Pa
    double poisson_ratio = 0.3;
    double gravity = 9.8;         // m/s^2, downward
    double lateral_force = 20.0;  // N, +x, total over the block
    int steps = 240;              // measured steps with the lateral force on
    int settle_steps = 80;        // force-free settling steps before measuring
    double h = 0.005;             // s, measured phase
    double settle_h = 0.005;      // s, settling phase
    double start_x = 3.95;        // block center abscissa
    double gap = 0.01;            // initial gap to the floor, in (0, d_hat)
    int floor_segments = 10;
    double floor_segment_length = 1.0;
  } block;

  struct Annulus {
    double r1 = 1.0;  // inner track radius, point A
    double r2 = 1.5;  // outer track radius, point B
    double spring_stiffness = 100.0;
    int verts_per_quarter = 16;
    double track_gap = 0.0;  // 0 = d_hat / 2
    // forward sweep
    int samples = 50;
    double theta_min = 0.25;
    double theta_max = 1.32;
    // inverse design
    double theta_b0 = 0.5;
    double target_theta_a = 0.8054;
    double lr = 0.3;
    int max_steps = 50;
    double obj_tol = 1e-6;
  } annulus;

  void validate() const;
};

// Parses scenario text. `source` names the input in diagnostics. Unknown
// sections or keys raise ConfigError with "source:line" prefixes.
Scenario parse_scenario(const std::string& text, const std::string& source);
Scenario load_scenario(const std::filesystem::path& path);

// Applies a dotted-path override such as "formulation.kind=IMLS" or
// "block.lateral_force=5". Unknown paths raise ConfigError naming the key.
void apply_override(Scenario& scenario, const std::string& assignment);

}  // namespace smoothcontact
