#pragma once

#include <Eigen/Sparse>
#include <ostream>

#include "smoothcontact/contact.hpp"

namespace smoothcontact {

struct SolverConfig {
  double grad_tol = 1e-8;    // scaled by max(1, |f_e|_inf) by callers that know f_e
  int max_iters = 200;
  double ls_shrink = 0.5;
  double ls_armijo = 1e-4;
  double reg_init_scale = 1e-8;  // reg_init = scale * |H|_inf
  double reg_growth = 10.0;
  double max_step = 0.0;  // inf-norm cap on the Newton step; 0 = unlimited
  std::ostream* verbose = nullptr;  // per-iteration CSV stream

  void validate() const {
    if (grad_tol <= 0 || max_iters <= 0 || ls_shrink <= 0 || ls_shrink >= 1 || ls_armijo <= 0 ||
        ls_armijo >= 1 || reg_init_scale <= 0 || reg_growth <= 1 || max_step < 0)
      throw ConfigError("invalid solver configuration");
  }
};

class ObjectiveBase {
 public:
  virtual ~ObjectiveBase() = default;
  // Both may throw InfeasibleError; the line search then shrinks the step.
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual EnergyDerivatives derivatives(const Eigen::VectorXd& x) const = 0;
};

struct NewtonStats {
  int iterations = 0;
  bool converged = false;
  double final_grad_norm = 0.0;
  int line_search_steps = 0;
};

struct NewtonResult {
  Eigen::VectorXd x;
  NewtonStats stats;
};

// Newton with adaptive Tikhonov regularization and a backtracking line search
// that filters infeasible trial states (penetration, inversion) by shrinking
// the step. Throws SolverError("line search failure") when alpha underflows.
NewtonResult newton_minimize(const ObjectiveBase& objective, const Eigen::VectorXd& x0,
                             const SolverConfig& config);

// Cholesky solve of a symmetric system; throws SolverError on a non-SPD or
// numerically singular factorization and on residuals above 1e-8 relative.
Eigen::VectorXd solve_linear_spd(const Eigen::SparseMatrix<double>& matrix,
                                 const Eigen::VectorXd& rhs);

}  // namespace smoothcontact
