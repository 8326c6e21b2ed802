#include "smoothcontact/inverse.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace smoothcontact {

Eigen::VectorXd equilibrium_sensitivity(const ParametricEnergy& energy,
                                        const Eigen::VectorXd& x_star, double theta,
                                        double fd_step) {
  const EnergyDerivatives at_star = energy(x_star, theta);
  const Eigen::VectorXd g_plus = energy(x_star, theta + fd_step).gradient;
  const Eigen::VectorXd g_minus = energy(x_star, theta - fd_step).gradient;
  const Eigen::VectorXd mixed = (g_plus - g_minus) / (2.0 * fd_step);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::SparseMatrix<double> h = at_star.hessian;
  h.makeCompressed();
  lu.compute(h);
  if (lu.info() != Eigen::Success) throw SolverError("singular equilibrium");
  const Eigen::VectorXd dx = lu.solve(-mixed);
  if (lu.info() != Eigen::Success) throw SolverError("singular equilibrium");
  return dx;
}

AnnulusSystem make_annulus_system(double r1, double r2, double spring_stiffness,
                                  int verts_per_quarter, const ContactFormulation& formulation,
                                  double track_gap) {
  if (!(0 < r1 && r1 < r2)) throw ConfigError("require 0 < r1 < r2");
  if (verts_per_quarter < 2) throw ConfigError("need at least 2 vertices per quarter");
  AnnulusSystem sys;
  sys.r1 = r1;
  sys.r2 = r2;
  sys.spring_stiffness = spring_stiffness;
  sys.verts_per_quarter = verts_per_quarter;
  sys.formulation = formulation;
  sys.track_gap = track_gap > 0 ? track_gap : 0.5 * formulation.barrier.d_hat;

  const double r_in = r1 + sys.track_gap;
  const double r_out = r2 - sys.track_gap;
  if (r_in >= r_out) throw ConfigError("tracks too close for the annulus");

  // CCW: outer arc with increasing angle, then inner arc back.
  Polyline poly;
  poly.closed = true;
  const int m = verts_per_quarter;
  for (int i = 0; i <= m; ++i) {
    const double a = 0.5 * M_PI * i / m;
    poly.vertices.emplace_back(r_out * std::cos(a), r_out * std::sin(a));
  }
  for (int i = m; i >= 0; --i) {
    const double a = 0.5 * M_PI * i / m;
    poly.vertices.emplace_back(r_in * std::cos(a), r_in * std::sin(a));
  }
  sys.annulus = vertex_normals(poly);
  return sys;
}

EnergyDerivatives AnnulusSystem::energy(double theta_a, double theta_b) const {
  const Vec2 xa = point_a(theta_a);
  const Vec2 xb = point_b(theta_b);
  const Vec2 tangent = r1 * Vec2(-std::sin(theta_a), std::cos(theta_a));
  const Vec2 curvature = -xa;  // d tangent / d theta

  // Spring
  const Vec2 spring_g = spring_stiffness * (xa - xb);
  Eigen::Matrix2d h_xa = spring_stiffness * Eigen::Matrix2d::Identity();
  double value = 0.5 * spring_stiffness * (xa - xb).squaredNorm();
  Vec2 g_xa = spring_g;

  // Contact of A against the (rigid) annulus boundary
  const EnergyDerivatives contact = contact_energy({xa}, annulus, formulation);
  value += contact.value;
  g_xa += Vec2(contact.gradient[0], contact.gradient[1]);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) h_xa(r, c) += contact.hessian.coeff(r, c);

  EnergyDerivatives out;
  out.value = value;
  out.gradient = Eigen::VectorXd::Constant(1, g_xa.dot(tangent));
  const double d2 = tangent.dot(h_xa * tangent) + g_xa.dot(curvature);
  out.hessian.resize(1, 1);
  out.hessian.insert(0, 0) = d2;
  return out;
}

double AnnulusSystem::energy_value(double theta_a, double theta_b) const {
  const Vec2 xa = point_a(theta_a);
  return 0.5 * spring_stiffness * (xa - point_b(theta_b)).squaredNorm() +
         contact_value({xa}, annulus, formulation);
}

namespace {
class ThetaObjective : public ObjectiveBase {
 public:
  ThetaObjective(const AnnulusSystem& sys, double theta_b) : sys_(sys), theta_b_(theta_b) {}
  double value(const Eigen::VectorXd& x) const override {
    return sys_.energy_value(x[0], theta_b_);
  }
  EnergyDerivatives derivatives(const Eigen::VectorXd& x) const override {
    return sys_.energy(x[0], theta_b_);
  }

 private:
  const AnnulusSystem& sys_;
  double theta_b_;
};
}  // namespace

double AnnulusSystem::solve_equilibrium(double theta_b, double theta_a_init,
                                        const SolverConfig& config) const {
  const ThetaObjective objective(*this, theta_b);
  SolverConfig local = config;
  // Keep continuation in the warm-start basin: an uncapped Newton step can
  // hop the angle by multiples of 2*pi, teleporting A through contact.
  if (local.max_step == 0) local.max_step = 0.1;
  const NewtonResult res =
      newton_minimize(objective, Eigen::VectorXd::Constant(1, theta_a_init), local);
  return res.x[0];
}

double AnnulusSystem::sensitivity(double theta_a_star, double theta_b) const {
  const ParametricEnergy pe = [this](const Eigen::VectorXd& x, double th_b) {
    return energy(x[0], th_b);
  };
  return equilibrium_sensitivity(pe, Eigen::VectorXd::Constant(1, theta_a_star), theta_b)[0];
}

InverseResult solve_inverse(const DesignProblem& problem, const AnnulusSystem& system,
                            const SolverConfig& config) {
  problem.validate();
  const Vec2 target = system.point_a(problem.target_theta_a);
  auto objective_of = [&](double theta_a) {
    return (system.point_a(theta_a) - target).squaredNorm();
  };

  InverseResult out;
  out.theta_b = problem.theta_b0;
  double lr = problem.lr / (problem.r1 * problem.r1);
  double theta_a = system.solve_equilibrium(out.theta_b, out.theta_b, config);
  double obj = objective_of(theta_a);
  out.objective_trajectory.push_back(obj);

  for (int step = 0; step < problem.max_steps; ++step) {
    if (obj < problem.obj_tol) {
      out.converged = true;
      break;
    }
    const double dta_dtb = system.sensitivity(theta_a, out.theta_b);
    const Vec2 dxa = problem.r1 * Vec2(-std::sin(theta_a), std::cos(theta_a));
    const double dobj = 2.0 * (system.point_a(theta_a) - target).dot(dxa) * dta_dtb;

    // halve the step while the objective would increase
    double theta_b_new = out.theta_b;
    double theta_a_new = theta_a;
    double obj_new = obj;
    for (int halving = 0; halving < 30; ++halving) {
      theta_b_new = out.theta_b - lr * dobj;
      theta_a_new = system.solve_equilibrium(theta_b_new, theta_a, config);
      obj_new = objective_of(theta_a_new);
      if (obj_new <= obj) break;
      lr *= 0.5;
    }
    if (obj_new <= obj) {
      out.theta_b = theta_b_new;
      theta_a = theta_a_new;
      obj = obj_new;
    }
    out.objective_trajectory.push_back(obj);
    out.steps = step + 1;
  }
  if (obj < problem.obj_tol) out.converged = true;
  out.theta_a = theta_a;
  return out;
}

}  // namespace smoothcontact
