#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lassonse/regularizer.hpp"

namespace lassonse {

/// One draw of y = A x0 + sigma v together with the LASSO parameters.
struct ProblemInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  double sigma;
  double lambda;
  RegularizerSpec spec;
  Eigen::VectorXd x0;
};

struct SolverReport {
  Eigen::VectorXd x_hat;
  int iterations = 0;
  /// Relative objective decrease over the last 10 iterations at stop.
  double final_gap = 0.0;
  /// ||x - prox(x - grad / L)||_inf at the last convergence check.
  double fixed_point_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
  /// Step-size constant used (1.01 x power-iteration estimate of ||A||^2).
  double lipschitz = 0.0;
  /// Objective at x = 0 followed by one entry per accepted iterate.
  std::vector<double> objective_history;
};

/// Largest squared singular value of A by power iteration on A'A, stopped
/// at relative change <= tol and inflated by 1%.
double spectral_norm_sq(const Eigen::MatrixXd& A, double tol = 1e-8);

/// 0.5 ||y - A x||^2 + sigma lambda f(x).
double lasso_objective(const ProblemInstance& instance, const Eigen::VectorXd& x);

/// Accelerated proximal gradient (FISTA) from x = 0 with a momentum restart
/// whenever the objective would increase. Stops once the relative objective
/// decrease over 10 iterations is <= tol and the fixed-point residual is
/// <= 1e-9 max(1, ||x||_inf); hitting max_iter first returns a report with
/// converged = false.
SolverReport solve(const ProblemInstance& instance, double tol = 1e-12,
                   int max_iter = 50000);

/// ||x_hat - x0||^2 / sigma^2.
double nse(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x0, double sigma);

}  // namespace lassonse
