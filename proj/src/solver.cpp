#include "smoothcontact/solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>

namespace smoothcontact {

Eigen::VectorXd solve_linear_spd(const Eigen::SparseMatrix<double>& matrix,
                                 const Eigen::VectorXd& rhs) {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(matrix);
  if (llt.info() != Eigen::Success) throw SolverError("singular system");
  const Eigen::VectorXd x = llt.solve(rhs);
  const double rhs_norm = rhs.norm();
  const double residual = (matrix * x - rhs).norm();
  if (!(residual <= 1e-8 * std::max(rhs_norm, 1e-300)) && rhs_norm > 0)
    throw SolverError("singular system");
  return x;
}

namespace {

double matrix_inf_norm(const Eigen::SparseMatrix<double>& m) {
  double n = 0;
  for (int c = 0; c < m.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it)
      n = std::max(n, std::abs(it.value()));
  return n;
}

Eigen::SparseMatrix<double> identity(int n) {
  Eigen::SparseMatrix<double> id(n, n);
  id.setIdentity();
  return id;
}

}  // namespace

NewtonResult newton_minimize(const ObjectiveBase& objective, const Eigen::VectorXd& x0,
                             const SolverConfig& config) {
  config.validate();
  const int n = static_cast<int>(x0.size());
  Eigen::VectorXd x = x0;
  NewtonStats stats;
  double energy = objective.value(x);  // must be feasible at x0

  if (config.verbose) (*config.verbose) << "iteration,energy,grad_inf_norm,alpha,mu\n";

  for (stats.iterations = 0; stats.iterations < config.max_iters; ++stats.iterations) {
    const EnergyDerivatives ed = objective.derivatives(x);
    const double grad_norm = ed.gradient.size() ? ed.gradient.cwiseAbs().maxCoeff() : 0.0;
    stats.final_grad_norm = grad_norm;
    if (grad_norm <= config.grad_tol) {
      stats.converged = true;
      if (config.verbose)
        (*config.verbose) << stats.iterations << "," << energy << "," << grad_norm << ",0,0\n";
      return {x, stats};
    }

    // Adaptive regularization: plain Newton first, then mu grown from
    // reg_init. A candidate mu must factorize, yield a descent direction, and
    // pass the backtracking line search; any failure grows mu further.
    const double h_norm = matrix_inf_norm(ed.hessian);
    const double mu_max = std::max(h_norm, 1.0) * 1e8;
    const double eps = std::numeric_limits<double>::epsilon();
    double mu = 0.0;
    bool accepted = false;
    double alpha = 1.0;
    while (!accepted) {
      Eigen::SparseMatrix<double> h = ed.hessian;
      if (mu > 0) h = h + mu * identity(n);
      Eigen::VectorXd dx;
      bool descent = false;
      try {
        dx = solve_linear_spd(h, -ed.gradient);
        if (config.max_step > 0) {
          const double step_norm = dx.cwiseAbs().maxCoeff();
          if (step_norm > config.max_step) dx *= config.max_step / step_norm;
        }
        descent = ed.gradient.dot(dx) < 0;
      } catch (const SolverError&) {
      }
      if (descent) {
        const double slope = ed.gradient.dot(dx);
        // The Newton decrement is below round-off of the energy: no
        // representable progress is possible, so the iterate is converged to
        // machine precision.
        if (-slope <= 8 * eps * (1.0 + std::abs(energy))) {
          stats.converged = true;
          return {x, stats};
        }
        // Backtracking line search with feasibility filtering.
        alpha = 1.0;
        while (alpha >= 1e-12) {
          ++stats.line_search_steps;
          try {
            const double trial = objective.value(x + alpha * dx);
            // `trial < energy` rejects null steps: once alpha * dx falls below
            // round-off of x the Armijo threshold rounds to `energy` and the
            // plain test would accept a step that makes no progress.
            if (trial <= energy + config.ls_armijo * alpha * slope && trial < energy) {
              x += alpha * dx;
              energy = trial;
              accepted = true;
              break;
            }
          } catch (const InfeasibleError&) {
            // infeasible trial: shrink like a failed Armijo test
          }
          alpha *= config.ls_shrink;
        }
      }
      if (!accepted) {
        mu = mu == 0.0 ? config.reg_init_scale * std::max(h_norm, 1.0) : mu * config.reg_growth;
        if (mu > mu_max) throw SolverError("line search failure");
      }
    }
    if (config.verbose)
      (*config.verbose) << stats.iterations << "," << energy << "," << grad_norm << "," << alpha
                        << "," << mu << "\n";
  }
  stats.converged = false;
  return {x, stats};
}

}  // namespace smoothcontact
