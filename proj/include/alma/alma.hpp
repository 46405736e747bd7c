#pragma once

#include <vector>

#include "alma/sketch.hpp"
#include "alma/solvers.hpp"

namespace alma {

struct AlmaConfig {
  int n_tau = 201;             // segment samples
  int n_alpha = 201;           // alpha samples per scaled curve
  int n_max = 100;             // iteration cap
  double lambda_rel_tol = 1e-4;
  double eta = 0.0;            // constraint bound (realized noise norm)

  void validate() const {
    if (n_tau < 3 || n_alpha < 3) throw config_error("AlmaConfig: n_tau, n_alpha must be >= 3");
    if (n_max < 1) throw config_error("AlmaConfig: n_max must be >= 1");
    if (!(eta >= 0.0)) throw config_error("AlmaConfig: eta must be nonnegative");
  }
};

struct AlmaIteration {
  int iteration = 0;
  double lambda = 0.0;
  double slope = 0.0;
  int hull_size = 0;
  int admm_iterations = 0;
  double objective = 0.0;
};

struct AlmaTrace {
  std::vector<AlmaIteration> iterations;
};

struct AlmaResult {
  double lambda = 0.0;
  ComplexImage x;
  AlmaTrace trace;
  bool converged = false;
};

/// The full loop: start from the gridded reconstruction, sketch the segment
/// to the least-squares point, take the lower hull of all sketched points,
/// read the tangent slope m at u = 0, set lambda = -1/m, reconstruct by
/// ADMM, and repeat (projecting the latest reconstruction back onto the
/// least-squares solution set) until lambda stabilizes to lambda_rel_tol or
/// n_max iterations are spent.
AlmaResult alma_run(const MriOperator& A, const MultiCoilKSpace& b, const AlmaConfig& cfg,
                    const SolverConfig& solver_cfg);

/// The first-iteration tuning parameter only (no ADMM reconstruction);
/// a cheap scale estimate used to center baseline search grids.
double alma_initial_lambda(const MriOperator& A, const MultiCoilKSpace& b,
                           const AlmaConfig& cfg, const SolverConfig& solver_cfg);

}  // namespace alma
