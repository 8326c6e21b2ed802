#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "../vendor/doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "smoothcontact/elasticity.hpp"
#include "smoothcontact/solver.hpp"

using namespace smoothcontact;

namespace {

TriMesh2D unit_right_triangle() {
  TriMesh2D mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 1, 2}};
  return mesh;
}

TriMesh2D unit_square_mesh() {
  TriMesh2D mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  return mesh;
}

Eigen::VectorXd positions_of(const TriMesh2D& mesh) {
  Eigen::VectorXd x(2 * mesh.vertices.size());
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    x[2 * v] = mesh.vertices[v].x();
    x[2 * v + 1] = mesh.vertices[v].y();
  }
  return x;
}

}  // namespace

TEST_CASE("material: plane-strain Lame parameters and validation") {
  Material m;
  m.youngs_modulus = 1e6;
  m.poisson_ratio = 0.3;
  CHECK(m.mu() == doctest::Approx(1e6 / 2.6).epsilon(1e-12));
  CHECK(m.lambda() == doctest::Approx(1e6 * 0.3 / (1.3 * 0.4)).epsilon(1e-12));
  CHECK_NOTHROW(m.validate());
  m.poisson_ratio = 0.5;
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("neo-hookean: rest configuration has zero energy and gradient") {
  DeformableBody body(unit_square_mesh(), Material{});
  const EnergyDerivatives d = neo_hookean_energy(body, body.rest_positions());
  CHECK(std::abs(d.value) < 1e-14);
  CHECK(d.gradient.norm() < 1e-8);
}

TEST_CASE("neo-hookean: rigid rotation keeps zero energy") {
  DeformableBody body(unit_square_mesh(), Material{});
  Eigen::Rotation2Dd rot(M_PI / 6.0);
  Eigen::VectorXd x = body.rest_positions();
  for (int v = 0; v < body.vertex_count(); ++v) {
    const Vec2 r = rot * Vec2(x[2 * v], x[2 * v + 1]);
    x[2 * v] = r.x();
    x[2 * v + 1] = r.y();
  }
  CHECK(std::abs(neo_hookean_energy(body, x).value) < 1e-10);
}

TEST_CASE("neo-hookean: uniform stretch matches the direct density formula") {
  Material m;
  m.youngs_modulus = 1e6;
  m.poisson_ratio = 0.3;
  DeformableBody body(unit_right_triangle(), m);

  // F = diag(1.1, 1.0) applied to the rest positions.
  Eigen::VectorXd x = body.rest_positions();
  for (int v = 0; v < body.vertex_count(); ++v) x[2 * v] *= 1.1;

  const double J = 1.1;
  const double trC = 1.1 * 1.1 + 1.0;
  const double density_energy = m.mu() / 2.0 * (trC - 2.0) - m.mu() * std::log(J) +
                                m.lambda() / 2.0 * std::log(J) * std::log(J);
  const double area = 0.5;
  CHECK(neo_hookean_energy(body, x).value ==
        doctest::Approx(area * density_energy).epsilon(1e-12));
  CHECK(neo_hookean_value(body, x) == doctest::Approx(area * density_energy).epsilon(1e-12));
}

TEST_CASE("neo-hookean: inverted elements raise an infeasibility error") {
  DeformableBody body(unit_right_triangle(), Material{});
  Eigen::VectorXd x = body.rest_positions();
  x[2] = -1.0;  // flip vertex 1 across the y axis: negative det(F)
  CHECK_THROWS_AS(neo_hookean_energy(body, x), InfeasibleError);
  CHECK_THROWS_AS(neo_hookean_value(body, x), InfeasibleError);
}

TEST_CASE("neo-hookean derivatives match finite differences at random states") {
  DeformableBody body(unit_square_mesh(), Material{1e4, 0.3, 1000.0});
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x = body.rest_positions();
    for (int i = 0; i < x.size(); ++i) x[i] += testutil::uniform(-0.05, 0.05);

    const EnergyDerivatives d = neo_hookean_energy(body, x);
    const Eigen::VectorXd fd_g = testutil::fd_gradient(
        [&](const Eigen::VectorXd& p) { return neo_hookean_value(body, p); }, x);
    CHECK(testutil::rel_err(d.gradient, fd_g) < 1e-4);

    const Eigen::MatrixXd fd_h = testutil::fd_hessian(
        [&](const Eigen::VectorXd& p) { return neo_hookean_energy(body, p).gradient; }, x);
    CHECK(testutil::rel_err(testutil::dense(d.hessian), fd_h) < 1e-3);
  }
}

TEST_CASE("lumped mass: unit right triangle at density 3 gives 0.5 per vertex") {
  Material m;
  m.density = 3.0;
  DeformableBody body(unit_right_triangle(), m);
  const Eigen::VectorXd mass = body.lumped_mass();
  REQUIRE(mass.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(mass[i] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(body.total_mass() == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("lumped mass: square split into two triangles conserves total mass") {
  Material m;
  m.density = 1.0;
  DeformableBody body(unit_square_mesh(), m);
  CHECK(body.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lumped mass: random mesh total equals density times total area") {
  TriMesh2D mesh = unit_square_mesh();
  for (Vec2& v : mesh.vertices) v += Vec2(testutil::uniform(-0.1, 0.1),
                                          testutil::uniform(-0.1, 0.1));
  Material m;
  m.density = 7.25;
  DeformableBody body(mesh, m);
  CHECK(body.total_mass() == doctest::Approx(m.density * mesh.total_area()).epsilon(1e-10));
}

TEST_CASE("dof map restricts and expands around pinned vertices") {
  DofMap map(8, {0, 1, 5});
  CHECK(map.free_count() == 5);
  Eigen::VectorXd full(8);
  full << 0, 1, 2, 3, 4, 5, 6, 7;
  const Eigen::VectorXd free = map.restrict_to_free(full);
  REQUIRE(free.size() == 5);
  Eigen::VectorXd reference = Eigen::VectorXd::Constant(8, -1.0);
  const Eigen::VectorXd back = map.expand(free, reference);
  CHECK(back[0] == -1.0);
  CHECK(back[1] == -1.0);
  CHECK(back[5] == -1.0);
  CHECK(back[2] == 2.0);
  CHECK(back[7] == 7.0);
}

TEST_CASE("incremental potential: free flight is the inertia stationary point") {
  World world;
  world.bodies.emplace_back(unit_square_mesh(), Material{});
  world.contact_enabled = false;
  world.f_ext = Eigen::VectorXd::Zero(world.total_dofs());
  world.h = 0.01;

  SimState state;
  state.positions = world.stacked_rest_positions();
  state.velocities = Eigen::VectorXd::Constant(world.total_dofs(), 0.4);

  IncrementalPotential pot(world, state);
  const Eigen::VectorXd x_pred = state.positions + world.h * state.velocities;
  const EnergyDerivatives d = pot.derivatives(pot.dofs().restrict_to_free(x_pred));
  // Rigid translation: elastic gradient is zero, so the full gradient is the
  // inertia component, which vanishes at the predicted positions.
  CHECK(d.gradient.norm() < 1e-10);
}

TEST_CASE("implicit Euler step under uniform gravity matches the closed form") {
  World world;
  world.bodies.emplace_back(unit_square_mesh(), Material{});
  world.contact_enabled = false;
  world.h = 0.01;
  const Eigen::VectorXd mass = world.stacked_lumped_mass();
  const double g = 9.8;
  world.f_ext = Eigen::VectorXd::Zero(world.total_dofs());
  for (int v = 0; v < 4; ++v) world.f_ext[2 * v + 1] = mass[2 * v + 1] * g;

  SimState state;
  state.positions = world.stacked_rest_positions();
  state.velocities = Eigen::VectorXd::Zero(world.total_dofs());
  state.velocities[0] = 0.3;  // uniform horizontal drift keeps the motion rigid
  for (int v = 1; v < 4; ++v) state.velocities[2 * v] = 0.3;

  SolverConfig config;
  const StepResult result = step(world, state, config);
  REQUIRE(result.state.positions.size() == world.total_dofs());
  CHECK(result.newton_iterations >= 1);

  // Minimizer of the quadratic part: x_t + h v_t - h^2 M^{-1} f_e.
  for (int i = 0; i < world.total_dofs(); ++i) {
    const double expect = state.positions[i] + world.h * state.velocities[i] -
                          world.h * world.h * world.f_ext[i] / mass[i];
    CHECK(result.state.positions[i] == doctest::Approx(expect).epsilon(1e-8));
  }
  CHECK(result.state.time == doctest::Approx(state.time + world.h));
}

TEST_CASE("a body at rest with no forces stays exactly at rest") {
  World world;
  world.bodies.emplace_back(unit_square_mesh(), Material{});
  world.contact_enabled = false;
  world.f_ext = Eigen::VectorXd::Zero(world.total_dofs());
  world.h = 0.01;

  SimState state;
  state.positions = world.stacked_rest_positions();
  state.velocities = Eigen::VectorXd::Zero(world.total_dofs());

  SolverConfig config;
  for (int s = 0; s < 5; ++s) {
    const StepResult result = step(world, state, config);
    CHECK((result.state.positions - world.stacked_rest_positions()).norm() == 0.0);
    state = result.state;
  }
}

TEST_CASE("momentum after one free-flight step obeys the impulse balance") {
  World world;
  world.bodies.emplace_back(unit_square_mesh(), Material{1e4, 0.3, 1000.0});
  world.contact_enabled = false;
  world.h = 0.01;
  world.f_ext = Eigen::VectorXd::Zero(world.total_dofs());
  for (int v = 0; v < 4; ++v) {
    world.f_ext[2 * v] = -1.5;  // physical force +1.5 N per vertex in x
    world.f_ext[2 * v + 1] = 2.0;
  }

  SimState state;
  state.positions = world.stacked_rest_positions();
  state.velocities = Eigen::VectorXd::Zero(world.total_dofs());
  for (int i = 0; i < world.total_dofs(); ++i)
    state.velocities[i] = testutil::uniform(-0.1, 0.1);

  SolverConfig config;
  config.grad_tol = 1e-10;
  const StepResult result = step(world, state, config);
  REQUIRE(result.converged);

  const Eigen::VectorXd mass = world.stacked_lumped_mass();
  const Eigen::VectorXd v_next =
      (result.state.positions - state.positions) / world.h;
  Vec2 momentum(0, 0), expected(0, 0);
  for (int v = 0; v < 4; ++v) {
    momentum += mass[2 * v] * Vec2(v_next[2 * v], v_next[2 * v + 1]);
    expected += mass[2 * v] * Vec2(state.velocities[2 * v], state.velocities[2 * v + 1]);
    // Physical force is minus the energy-convention external force.
    expected -= world.h * Vec2(world.f_ext[2 * v], world.f_ext[2 * v + 1]);
  }
  CHECK((momentum - expected).norm() < 1e-6 * std::max(1.0, expected.norm()));
}

TEST_CASE("incremental potential gradient matches finite differences with contact") {
  World world;
  TriMesh2D mesh = unit_square_mesh();
  for (Vec2& v : mesh.vertices) v += Vec2(1.0, 0.05);  // hover above the floor
  world.bodies.emplace_back(mesh, Material{1e4, 0.3, 1000.0});
  Polyline floor;
  for (int i = 4; i >= 0; --i) floor.vertices.emplace_back(static_cast<double>(i), 0.0);
  world.obstacles.push_back(vertex_normals(floor));
  world.contact.kind = ContactKind::IPC;
  world.contact.barrier = {0.2, 10.0};
  world.h = 0.01;
  world.f_ext = Eigen::VectorXd::Zero(world.total_dofs());
  for (int v = 0; v < 4; ++v) world.f_ext[2 * v + 1] = 0.5;

  SimState state;
  state.positions = world.stacked_rest_positions();
  state.velocities = Eigen::VectorXd::Zero(world.total_dofs());

  IncrementalPotential pot(world, state);
  Eigen::VectorXd free = pot.dofs().restrict_to_free(state.positions);
  for (int i = 0; i < free.size(); ++i) free[i] += testutil::uniform(-0.01, 0.01);

  const EnergyDerivatives d = pot.derivatives(free);
  const Eigen::VectorXd fd_g = testutil::fd_gradient(
      [&](const Eigen::VectorXd& p) { return pot.value(p); }, free);
  CHECK(testutil::rel_err(d.gradient, fd_g) < 1e-4);

  // Hessian symmetry and the constant inertia block.
  const Eigen::MatrixXd h = testutil::dense(d.hessian);
  CHECK((h - h.transpose()).norm() <= 1e-9 * h.norm());
  const Eigen::MatrixXd fd_h = testutil::fd_hessian(
      [&](const Eigen::VectorXd& p) { return pot.derivatives(p).gradient; }, free);
  CHECK(testutil::rel_err(h, fd_h) < 1e-3);
}

TEST_CASE("pinned vertices are eliminated from the unknowns") {
  World world;
  world.bodies.emplace_back(unit_square_mesh(), Material{1e4, 0.3, 1000.0},
                            std::vector<int>{0, 1});
  world.contact_enabled = false;
  world.h = 0.01;
  world.f_ext = Eigen::VectorXd::Zero(world.total_dofs());
  for (int v = 0; v < 4; ++v) world.f_ext[2 * v + 1] = 2.0;

  SimState state;
  state.positions = world.stacked_rest_positions();
  state.velocities = Eigen::VectorXd::Zero(world.total_dofs());

  SolverConfig config;
  const StepResult result = step(world, state, config);
  REQUIRE(result.converged);
  // Pinned vertices 0 and 1 did not move; the free ones did.
  CHECK(result.state.positions.head<4>() == state.positions.head<4>());
  CHECK((result.state.positions.tail<4>() - state.positions.tail<4>()).norm() > 0.0);
}
