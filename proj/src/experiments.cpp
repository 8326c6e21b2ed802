#include "smoothcontact/experiments.hpp"

#include <cmath>

namespace smoothcontact {

Polyline make_floor(int segments, double segment_length) {
  Polyline floor;
  floor.closed = false;
  for (int i = segments; i >= 0; --i) floor.vertices.emplace_back(i * segment_length, 0.0);
  return vertex_normals(floor);
}

TriMesh2D make_block_mesh(double size, const Vec2& center) {
  TriMesh2D mesh;
  const double h = 0.5 * size;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      mesh.vertices.emplace_back(center.x() + (i - 1) * h, center.y() + (j - 1) * h);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      const int a = j * 3 + i, b = a + 1, c = b + 3, d = a + 3;
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  mesh.validate();
  return mesh;
}

std::vector<ScanRow> energy_wall_scan(const Polyline& poly, double height,
                                      const ContactFormulation& formulation, int n_samples,
                                      double x_min, double x_max) {
  formulation.validate();
  if (!(0 < height && height < formulation.barrier.d_hat))
    throw ConfigError("scan height must lie in (0, d_hat)");
  if (n_samples < 2 || !(x_min < x_max)) throw ConfigError("invalid scan range");
  std::vector<ScanRow> rows;
  rows.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double x = x_min + (x_max - x_min) * i / (n_samples - 1);
    const EnergyDerivatives e = contact_energy({Vec2(x, height)}, poly, formulation);
    rows.push_back({x, e.value, -e.gradient[0], -e.gradient[1]});
  }
  return rows;
}

std::vector<ScanRow> energy_wall_scan(const Scenario& scenario) {
  const auto& s = scenario.scan;
  const Polyline floor = make_floor(s.segments, s.segment_length);
  const double length = s.segments * s.segment_length;
  if (2 * s.margin >= length) throw ConfigError("scan margin leaves an empty range");
  return energy_wall_scan(floor, s.height, scenario.formulation, s.n_samples, s.margin,
                          length - s.margin);
}

namespace {

Vec2 mass_centroid(const World& world, const Eigen::VectorXd& positions) {
  const Eigen::VectorXd mass = world.stacked_lumped_mass();
  Vec2 c(0, 0);
  double total = 0;
  for (int v = 0; v < positions.size() / 2; ++v) {
    c += mass[2 * v] * Vec2(positions[2 * v], positions[2 * v + 1]);
    total += mass[2 * v];
  }
  return c / total;
}

}  // namespace

SlidingBlockResult sliding_block(const Scenario& scenario, std::ostream* solver_log) {
  scenario.validate();
  const auto& b = scenario.block;

  Material material;
  material.youngs_modulus = b.youngs_modulus;
  material.poisson_ratio = b.poisson_ratio;
  material.density = b.density;

  World world;
  world.bodies.emplace_back(make_block_mesh(b.size, Vec2(b.start_x, 0.5 * b.size + b.gap)),
                            material);
  world.obstacles.push_back(make_floor(b.floor_segments, b.floor_segment_length));
  world.contact = scenario.formulation;
  world.h = b.h;

  const DeformableBody& block = world.bodies[0];
  const Eigen::VectorXd mass = block.lumped_mass();
  // Energy convention: physical force F contributes f_e = -F.
  Eigen::VectorXd gravity = Eigen::VectorXd::Zero(block.dof_count());
  for (int v = 0; v < block.vertex_count(); ++v) gravity[2 * v + 1] = mass[2 * v] * b.gravity;
  Eigen::VectorXd lateral = Eigen::VectorXd::Zero(block.dof_count());
  for (int v = 0; v < block.vertex_count(); ++v)
    lateral[2 * v] = -b.lateral_force * mass[2 * v] / block.total_mass();

  SolverConfig config;
  config.grad_tol = 1e-8 * std::max(1.0, gravity.lpNorm<Eigen::Infinity>());
  config.verbose = solver_log;

  SimState state;
  state.positions = world.stacked_rest_positions();
  state.velocities = Eigen::VectorXd::Zero(world.total_dofs());

  SlidingBlockResult result;
  result.block_mass = block.total_mass();

  world.f_ext = gravity;
  world.h = b.settle_h;
  for (int i = 0; i < b.settle_steps; ++i) {
    const StepResult r = step(world, state, config);
    state = r.state;
    result.newton_iterations += r.newton_iterations;
  }
  state.velocities.setZero();
  state.time = 0.0;
  world.h = b.h;
  result.start_centroid = mass_centroid(world, state.positions);

  world.f_ext = gravity + lateral;
  for (int i = 0; i < b.steps; ++i) {
    const StepResult r = step(world, state, config);
    state = r.state;
    result.newton_iterations += r.newton_iterations;
    if (!r.converged && result.failed_step < 0) result.failed_step = i;
    result.time.push_back(state.time);
    result.centroid.push_back(mass_centroid(world, state.positions));
  }
  return result;
}

AnnulusSystem annulus_system_from(const Scenario& scenario) {
  const auto& a = scenario.annulus;
  return make_annulus_system(a.r1, a.r2, a.spring_stiffness, a.verts_per_quarter,
                             scenario.formulation, a.track_gap);
}

AnnulusForwardResult annulus_forward(const Scenario& scenario, std::ostream* solver_log) {
  scenario.validate();
  const AnnulusSystem system = annulus_system_from(scenario);
  const auto& a = scenario.annulus;
  SolverConfig config;
  config.verbose = solver_log;
  AnnulusForwardResult result;
  double theta_a = a.theta_min;
  for (int i = 0; i < a.samples; ++i) {
    const double theta_b =
        a.samples == 1 ? a.theta_min
                       : a.theta_min + (a.theta_max - a.theta_min) * i / (a.samples - 1);
    theta_a = system.solve_equilibrium(theta_b, theta_a, config);
    result.theta_b.push_back(theta_b);
    result.theta_a.push_back(theta_a);
    result.max_error = std::max(result.max_error, std::abs(theta_a - theta_b));
  }
  return result;
}

InverseResult annulus_inverse(const Scenario& scenario, std::ostream* solver_log) {
  scenario.validate();
  const AnnulusSystem system = annulus_system_from(scenario);
  const auto& a = scenario.annulus;
  DesignProblem problem;
  problem.theta_b0 = a.theta_b0;
  problem.target_theta_a = a.target_theta_a;
  problem.r1 = a.r1;
  problem.r2 = a.r2;
  problem.spring_stiffness = a.spring_stiffness;
  problem.lr = a.lr;
  problem.max_steps = a.max_steps;
  problem.obj_tol = a.obj_tol;
  SolverConfig config;
  config.verbose = solver_log;
  return solve_inverse(problem, system, config);
}

}  // namespace smoothcontact
