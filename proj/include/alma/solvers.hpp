#pragma once

#include "alma/operators.hpp"
#include "alma/tv.hpp"

namespace alma {

struct SolverConfig {
  double cg_tol = 1e-8;       // relative normal-equation residual
  int cg_max_iter = 500;
  double admm_rho = 1.0;
  int admm_max_iter = 300;
  double admm_tol = 1e-6;     // relative primal and dual residuals
  bool admm_adapt_rho = true; // residual balancing, factor 2 at ratio 10

  void validate() const {
    if (cg_tol <= 0 || cg_max_iter <= 0 || admm_rho <= 0 || admm_max_iter <= 0 || admm_tol <= 0)
      throw config_error("SolverConfig: all tolerances and budgets must be positive");
  }
};

struct LsqResult {
  ComplexImage x;
  double residual_norm = 0.0;  // |A x - b|_2 at the returned iterate
  int iterations = 0;
};

/// Minimizer of |A x - b|_2 via conjugate gradients on the normal equations,
/// started from zero (hence the minimum-norm least-squares solution).
/// Stops when |A^H (A x - b)| <= cg_tol * |A^H b|.
LsqResult solve_least_squares(const MriOperator& A, const MultiCoilKSpace& b,
                              const SolverConfig& cfg);

/// Euclidean projection of x onto the least-squares solution set: x + z where
/// z is the minimum-norm solution of min |A z - (b - A x)|_2 (CG on the
/// normal equations from zero stays in range(A^H)). Satisfies the same
/// normal-equation residual bound as solve_least_squares.
LsqResult project_onto_lsq_set(const ComplexImage& x, const MriOperator& A,
                               const MultiCoilKSpace& b, const SolverConfig& cfg);

/// Warm-start carrier for chained ADMM solves (consecutive ALMA iterations,
/// neighboring points of a lambda sweep). The scaled dual variable is
/// rescaled by the lambda ratio when the tuning parameter changes.
struct AdmmState {
  ComplexImage x;
  GradientField z;
  GradientField u;
  double rho = 0.0;
  double lambda = 0.0;
  bool valid = false;
};

struct AdmmResult {
  ComplexImage x;          // best-objective iterate encountered
  double objective = 0.0;  // 0.5*|Ax-b|^2 + (lambda/2)*TV(x) at x
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

/// Approximate minimizer of 0.5*|A x - b|_2^2 + (lambda/2)*|D x|_1 by ADMM
/// on the splitting z = D x. The x-update solves
/// (A^H A + rho D^T D) x = A^H b + rho D^T (z - u) by warm-started CG.
/// The returned objective never exceeds the objective at the starting point.
AdmmResult admm_tv_lasso(const MriOperator& A, const MultiCoilKSpace& b, double lambda,
                         const SolverConfig& cfg, const ComplexImage& x_init,
                         AdmmState* state = nullptr);

/// Convenience overload starting from the zero-filled gridded reconstruction.
AdmmResult admm_tv_lasso(const MriOperator& A, const MultiCoilKSpace& b, double lambda,
                         const SolverConfig& cfg);

/// 0.5*|A x - b|_2^2 + (lambda/2)*TV(x)
double tv_lasso_objective(const MriOperator& A, const MultiCoilKSpace& b, double lambda,
                          const ComplexImage& x);

}  // namespace alma
