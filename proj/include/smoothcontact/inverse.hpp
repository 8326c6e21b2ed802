#pragma once

#include <functional>

#include "smoothcontact/contact.hpp"
#include "smoothcontact/solver.hpp"

namespace smoothcontact {

// Energy of a parametric system: derivatives with respect to the state x at a
// given design parameter theta.
using ParametricEnergy = std::function<EnergyDerivatives(const Eigen::VectorXd& x, double theta)>;

// Implicit-function-theorem sensitivity of an equilibrium state:
//   dx*/dtheta = -(d2E/dx2)^-1 d2E/dx dtheta,
// with the mixed partial by central finite differences of the analytic
// gradient over theta. Throws SolverError("singular equilibrium").
Eigen::VectorXd equilibrium_sensitivity(const ParametricEnergy& energy,
                                        const Eigen::VectorXd& x_star, double theta,
                                        double fd_step = 1e-6);

// Quarter-annulus inverse design: point B on the outer track (design angle
// theta_B) drags point A on the inner track through a zero-rest-length spring;
// find theta_B such that A rests at the target angle.
struct DesignProblem {
  double theta_b0 = 0.4;        // initial design angle [rad]
  double target_theta_a = 1.0;  // target angle for A [rad]
  double r1 = 1.0;              // inner track radius [m]
  double r2 = 1.5;              // outer track radius [m]
  double spring_stiffness = 100.0;  // N/m
  double lr = 0.3;                  // descent step, scaled by 1/r1^2
  int max_steps = 50;
  double obj_tol = 1e-6;  // m^2

  void validate() const {
    if (!(0 < r1 && r1 < r2) || spring_stiffness <= 0 || lr <= 0 || max_steps <= 0)
      throw ConfigError("invalid design problem");
  }
};

struct AnnulusSystem {
  double r1 = 1.0;
  double r2 = 1.5;
  double spring_stiffness = 100.0;
  int verts_per_quarter = 16;
  double track_gap = 0.0;  // gap between each track and the annulus surface;
                           // 0 = d_hat/2 of the formulation
  ContactFormulation formulation;

  Polyline annulus;  // built by make_annulus_system

  Vec2 point_a(double theta_a) const { return r1 * Vec2(std::cos(theta_a), std::sin(theta_a)); }
  Vec2 point_b(double theta_b) const { return r2 * Vec2(std::cos(theta_b), std::sin(theta_b)); }

  // Total energy in theta_A (1 dof) at prescribed theta_B: spring + contact of
  // A against the annulus boundary.
  EnergyDerivatives energy(double theta_a, double theta_b) const;
  double energy_value(double theta_a, double theta_b) const;

  // Static equilibrium angle of A, warm-started from theta_a_init.
  double solve_equilibrium(double theta_b, double theta_a_init,
                           const SolverConfig& config = {}) const;

  // d theta_A / d theta_B at equilibrium.
  double sensitivity(double theta_a_star, double theta_b) const;
};

// Quarter annulus (angles 0..pi/2) whose inner/outer boundaries sit track_gap
// away from the tracks r1, r2; CCW closed polyline.
AnnulusSystem make_annulus_system(double r1, double r2, double spring_stiffness,
                                  int verts_per_quarter, const ContactFormulation& formulation,
                                  double track_gap = 0.0);

struct InverseResult {
  double theta_b;
  double theta_a;  // equilibrium at the final design
  std::vector<double> objective_trajectory;  // objective after each evaluation, index 0 = initial
  bool converged = false;
  int steps = 0;
};

// Gradient descent on theta_B with sensitivity-based gradients; the step size
// is halved whenever the objective would increase. `config` is used for the
// inner equilibrium solves.
InverseResult solve_inverse(const DesignProblem& problem, const AnnulusSystem& system,
                            const SolverConfig& config = {});

}  // namespace smoothcontact
