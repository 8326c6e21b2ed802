#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <functional>
#include <random>

namespace testutil {

using ValueFn = std::function<double(const Eigen::VectorXd&)>;
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline Eigen::VectorXd fd_gradient(const ValueFn& f, const Eigen::VectorXd& x,
                                   double step = 1e-6) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (int i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + step;
    const double fp = f(xp);
    xp[i] = x[i] - step;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

inline Eigen::MatrixXd fd_hessian(const GradFn& grad, const Eigen::VectorXd& x,
                                  double step = 1e-5) {
  Eigen::MatrixXd h(x.size(), x.size());
  Eigen::VectorXd xp = x;
  for (int i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + step;
    const Eigen::VectorXd gp = grad(xp);
    xp[i] = x[i] - step;
    const Eigen::VectorXd gm = grad(xp);
    xp[i] = x[i];
    h.col(i) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

inline double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(1e-12, b.norm());
  return (a - b).norm() / scale;
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(1e-12, b.norm());
  return (a - b).norm() / scale;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1e-12, std::abs(b));
}

inline Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& m) {
  return Eigen::MatrixXd(m);
}

// Deterministic RNG for randomized oracles.
inline std::mt19937& rng() {
  static std::mt19937 gen(20260826u);
  return gen;
}

inline double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng());
}

}  // namespace testutil
