#pragma once

#include "smoothcontact/elasticity.hpp"
#include "smoothcontact/inverse.hpp"
#include "smoothcontact/scenario.hpp"

#include <ostream>

namespace smoothcontact {

// Flat floor made of `segments` collinear segments on y = 0, from
// x = segments * segment_length down to x = 0 so the outward normals point up.
Polyline make_floor(int segments, double segment_length);

// Axis-aligned square of the given side length centered at `center`,
// triangulated from a 3x3 vertex grid (8 positively oriented triangles).
TriMesh2D make_block_mesh(double size, const Vec2& center);

// One probe moved at constant height above the floor polyline; energy and
// negated gradient components per abscissa.
struct ScanRow {
  double x;
  double energy;
  double tangential_force;  // -dE/dx
  double normal_force;      // -dE/dy
};
std::vector<ScanRow> energy_wall_scan(const Polyline& poly, double height,
                                      const ContactFormulation& formulation, int n_samples,
                                      double x_min, double x_max);

// Convenience: scan the scenario's flat floor between margin and
// total length - margin.
std::vector<ScanRow> energy_wall_scan(const Scenario& scenario);

struct SlidingBlockResult {
  std::vector<double> time;     // s, per measured step
  std::vector<Vec2> centroid;   // mass-weighted centroid per measured step
  Vec2 start_centroid;          // after settling, before the lateral force
  double block_mass = 0.0;      // kg
  int newton_iterations = 0;    // total over all steps
  int failed_step = -1;         // first non-converged step, -1 if none
};
SlidingBlockResult sliding_block(const Scenario& scenario, std::ostream* solver_log = nullptr);

struct AnnulusForwardResult {
  std::vector<double> theta_b;
  std::vector<double> theta_a;
  double max_error = 0.0;  // max |theta_a - theta_b|
};
AnnulusForwardResult annulus_forward(const Scenario& scenario,
                                     std::ostream* solver_log = nullptr);

AnnulusSystem annulus_system_from(const Scenario& scenario);
InverseResult annulus_inverse(const Scenario& scenario, std::ostream* solver_log = nullptr);

}  // namespace smoothcontact
