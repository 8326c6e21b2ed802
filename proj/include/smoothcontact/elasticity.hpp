#pragma once

#include <optional>

#include "smoothcontact/contact.hpp"
#include "smoothcontact/geometry.hpp"

namespace smoothcontact {

struct Material {
  double youngs_modulus = 1e6;  // Pa
  double poisson_ratio = 0.3;
  double density = 1000.0;  // kg/m^3

  void validate() const {
    if (youngs_modulus <= 0 || density <= 0 || poisson_ratio <= -1 || poisson_ratio >= 0.5)
      throw ConfigError("invalid material");
  }
  // Plane-strain Lame parameters.
  double mu() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }
  double lambda() const {
    return youngs_modulus * poisson_ratio /
           ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
  }
};

// Triangle FEM body: rest mesh, material, pinned vertices, and precomputed
// per-element rest data. Local coordinate layout: [v0.x, v0.y, v1.x, ...].
class DeformableBody {
 public:
  DeformableBody(TriMesh2D rest, Material material, std::vector<int> fixed_vertices = {});

  const TriMesh2D& rest() const { return rest_; }
  const Material& material() const { return material_; }
  const std::vector<int>& fixed_vertices() const { return fixed_; }
  int vertex_count() const { return static_cast<int>(rest_.vertices.size()); }
  int dof_count() const { return 2 * vertex_count(); }
  const std::vector<int>& boundary_loop() const { return boundary_loop_; }

  Eigen::VectorXd rest_positions() const;
  // Per-dof lumped mass: each vertex gets density/3 of its adjacent rest area.
  Eigen::VectorXd lumped_mass() const;
  double total_mass() const;

 private:
  TriMesh2D rest_;
  Material material_;
  std::vector<int> fixed_;
  std::vector<Eigen::Matrix2d> dm_inv_;
  std::vector<double> rest_area_;
  std::vector<int> boundary_loop_;

  friend EnergyDerivatives neo_hookean_energy(const DeformableBody&, const Eigen::VectorXd&);
  friend double neo_hookean_value(const DeformableBody&, const Eigen::VectorXd&);
};

// Neo-Hookean energy Psi = sum_tri A * [mu/2 (tr(F^T F) - 2) - mu ln J
// + lambda/2 (ln J)^2]. Throws InfeasibleError("element inversion") if any
// deformed triangle has det(F) <= 0.
EnergyDerivatives neo_hookean_energy(const DeformableBody& body, const Eigen::VectorXd& positions);
double neo_hookean_value(const DeformableBody& body, const Eigen::VectorXd& positions);

struct SimState {
  Eigen::VectorXd positions;
  Eigen::VectorXd velocities;
  double time = 0.0;
};

// A simulation world: deformable bodies stacked into one global dof vector,
// rigid obstacle polylines, external forces (energy convention: E += x^T f_e,
// so a physical force F contributes f_e = -F), and a contact formulation.
struct World {
  std::vector<DeformableBody> bodies;
  std::vector<Polyline> obstacles;
  ContactFormulation contact;
  bool contact_enabled = true;
  Eigen::VectorXd f_ext;  // energy convention, full layout
  double h = 0.005;

  int dof_offset(int body) const;
  int total_dofs() const;
  Eigen::VectorXd stacked_rest_positions() const;
  Eigen::VectorXd stacked_lumped_mass() const;
  std::vector<int> fixed_dofs() const;  // global dof indices of pinned vertices
};

// Maps between the full stacked vector and the free (unpinned) unknowns.
class DofMap {
 public:
  DofMap(int total_dofs, const std::vector<int>& fixed_dofs);
  int free_count() const { return static_cast<int>(free_to_full_.size()); }
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;
  // Free values scattered into a copy of `reference` (fixed dofs keep their
  // reference values).
  Eigen::VectorXd expand(const Eigen::VectorXd& free, const Eigen::VectorXd& reference) const;
  const std::vector<int>& free_to_full() const { return free_to_full_; }

 private:
  std::vector<int> free_to_full_;
  std::vector<int> full_to_free_;  // -1 for fixed

  friend class IncrementalPotential;
};

// Implicit-Euler incremental potential over the free dofs:
//   E(x) = 1/(2h^2) (x^T M x - x^T M (x_t + h v_t)) + Psi(x) + x^T f_e
//          + E_contact(x)
// Contact is evaluated on boundary polylines extracted from the candidate
// positions with recomputed vertex normals; rigid obstacle vertices do not act
// as probes.
class IncrementalPotential {
 public:
  IncrementalPotential(const World& world, const SimState& state);

  const DofMap& dofs() const { return dofs_; }
  Eigen::VectorXd full_positions(const Eigen::VectorXd& free) const;
  double value(const Eigen::VectorXd& free) const;
  EnergyDerivatives derivatives(const Eigen::VectorXd& free) const;

 private:
  const World& world_;
  DofMap dofs_;
  Eigen::VectorXd mass_;     // per full dof
  Eigen::VectorXd inertia_;  // x_t + h v_t
  Eigen::VectorXd x_t_;

  template <bool Derivs>
  double contact_terms(const Eigen::VectorXd& full, Eigen::VectorXd* grad,
                       std::vector<Eigen::Triplet<double>>* trips) const;
};

struct StepResult {
  SimState state;
  int newton_iterations = 0;
  bool converged = false;
};

struct SolverConfig;  // solver.hpp
StepResult step(const World& world, const SimState& state, const SolverConfig& config);

}  // namespace smoothcontact
