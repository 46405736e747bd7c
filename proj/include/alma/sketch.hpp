#pragma once

#include <vector>

#include "alma/operators.hpp"

namespace alma {

/// A point of the (u, t) plane: u = 0.5*(|A x - b|^2 - eta^2), t = 0.5*TV(x).
struct EpigraphPoint {
  double u = 0.0;
  double t = 0.0;

  friend bool operator==(const EpigraphPoint&, const EpigraphPoint&) = default;
};

using EpigraphCloud = std::vector<EpigraphPoint>;

/// Lower convex boundary of a point cloud: vertices sorted by u with
/// strictly increasing edge slopes.
struct LowerHull {
  std::vector<EpigraphPoint> vertices;
};

/// Scalars that determine the scaled curve alpha -> (u(alpha x), t(alpha x)):
/// u is a parabola in alpha, t is proportional to |alpha|.
struct CurveScalars {
  double ax_norm_sq = 0.0;  // |A x|_2^2
  double b_ax = 0.0;        // real inner product of b with A x (stacked re/im)
  double b_norm_sq = 0.0;   // |b|_2^2
  double tv = 0.0;          // TV(x)
};

/// Points (u(alpha_k x), t(alpha_k x)) for n_alpha equally spaced alpha in
/// [-alpha_max, alpha_max] with alpha_max = |b^T A x| / |A x|^2 (the u-vertex
/// of the parabola branches). A degenerate curve (|A x| = 0 or alpha_max = 0)
/// collapses to the single point (0.5*(|b|^2 - eta^2), 0).
EpigraphCloud sketch_scaled_curve(const ComplexImage& x, const MriOperator& A,
                                  const MultiCoilKSpace& b, double eta, int n_alpha);

/// As above but from precomputed scalars (the forward operator applications
/// are hoisted out by callers that sweep many related points).
EpigraphCloud sketch_curve_from_scalars(const CurveScalars& s, double eta, int n_alpha);

/// Union of scaled curves over the segment x_tau = tau*x_a + (1-tau)*x_b for
/// n_tau equally spaced tau in [0, 1]. Uses linearity of A: the segment needs
/// only two forward applications.
EpigraphCloud sketch_segment(const ComplexImage& x_a, const ComplexImage& x_b,
                             const MriOperator& A, const MultiCoilKSpace& b, double eta,
                             int n_tau, int n_alpha);

/// Andrew monotone-chain lower hull. Requires at least two distinct points.
LowerHull lower_convex_hull(EpigraphCloud cloud);

/// Slope of the hull edge whose u-interval contains 0 (the edge to the left
/// when u = 0 falls exactly on a vertex). Negative by construction of the
/// epigraph boundary; a nonnegative slope raises geometry_error.
double tangent_slope_at_zero(const LowerHull& hull);

}  // namespace alma
