#pragma once

#include <vector>

#include "alma/solvers.hpp"

namespace alma {

struct LCurvePoint {
  double lambda = 0.0;
  double log_residual = 0.0;  // log |A x_lambda - b|_2
  double log_tv = 0.0;        // log TV(x_lambda)
};

struct LCurveResult {
  double lambda = 0.0;  // grid point of maximum discrete curvature
  int corner_index = 0;
  std::vector<LCurvePoint> points;  // sorted by lambda ascending
  ComplexImage x;                   // reconstruction at the corner
};

/// Index of maximum signed three-point curvature of the (log residual,
/// log TV) curve; points must be sorted by lambda ascending. Ties break
/// toward smaller lambda. Throws no_corner_error when every interior
/// curvature is nonpositive.
int lcurve_corner_index(const std::vector<LCurvePoint>& points);

/// Reconstructs x_lambda over the grid (warm-started sweep from large to
/// small lambda) and picks the corner of the log-log curve.
LCurveResult lcurve_select(const MriOperator& A, const MultiCoilKSpace& b,
                           std::vector<double> lambda_grid, const SolverConfig& cfg);

/// n log-spaced values covering [lo, hi] inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace alma
