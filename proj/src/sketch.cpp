#include "alma/sketch.hpp"

#include <algorithm>
#include <cmath>

#include "alma/tv.hpp"

namespace alma {

EpigraphCloud sketch_curve_from_scalars(const CurveScalars& s, double eta, int n_alpha) {
  if (n_alpha < 3) throw config_error("sketch: n_alpha must be at least 3");
  const double u0 = 0.5 * (s.b_norm_sq - eta * eta);
  if (s.ax_norm_sq <= 0.0 || s.b_ax == 0.0) return {{u0, 0.0}};

  const double alpha_max = std::abs(s.b_ax) / s.ax_norm_sq;
  EpigraphCloud cloud;
  cloud.reserve(n_alpha);
  for (int k = 0; k < n_alpha; ++k) {
    // Exactly symmetric grid: hits -alpha_max, 0 (odd n_alpha) and alpha_max.
    double alpha = alpha_max * (2.0 * k / (n_alpha - 1) - 1.0);
    double u = 0.5 * (alpha * alpha * s.ax_norm_sq - 2.0 * alpha * s.b_ax + s.b_norm_sq -
                      eta * eta);
    double t = 0.5 * std::abs(alpha) * s.tv;
    cloud.push_back({u, t});
  }
  return cloud;
}

EpigraphCloud sketch_scaled_curve(const ComplexImage& x, const MriOperator& A,
                                  const MultiCoilKSpace& b, double eta, int n_alpha) {
  MultiCoilKSpace ax = A.apply(x);
  CurveScalars s;
  s.ax_norm_sq = norm2_sq(ax);
  s.b_ax = dot_real(b.flat(), ax.flat());
  s.b_norm_sq = norm2_sq(b);
  s.tv = tv_value(x);
  return sketch_curve_from_scalars(s, eta, n_alpha);
}

EpigraphCloud sketch_segment(const ComplexImage& x_a, const ComplexImage& x_b,
                             const MriOperator& A, const MultiCoilKSpace& b, double eta,
                             int n_tau, int n_alpha) {
  require_same_shape(x_a, x_b, "sketch_segment");
  if (n_tau < 2) throw config_error("sketch: n_tau must be at least 2");

  const MultiCoilKSpace ax_a = A.apply(x_a);
  const MultiCoilKSpace ax_b = A.apply(x_b);
  const double b_norm_sq = norm2_sq(b);

  EpigraphCloud cloud;
  cloud.reserve(static_cast<std::size_t>(n_tau) * n_alpha);
  ComplexImage x_tau(x_a.rows(), x_a.cols());
  std::vector<cplx> ax_tau(ax_a.data.size());
  for (int j = 0; j < n_tau; ++j) {
    const double tau = static_cast<double>(j) / (n_tau - 1);
    lincomb(tau, x_a, 1.0 - tau, x_b, x_tau);
    for (std::size_t i = 0; i < ax_tau.size(); ++i)
      ax_tau[i] = tau * ax_a.data[i] + (1.0 - tau) * ax_b.data[i];

    CurveScalars s;
    s.ax_norm_sq = norm2_sq(std::span<const cplx>(ax_tau));
    s.b_ax = dot_real(b.flat(), std::span<const cplx>(ax_tau));
    s.b_norm_sq = b_norm_sq;
    s.tv = tv_value(x_tau);
    EpigraphCloud curve = sketch_curve_from_scalars(s, eta, n_alpha);
    cloud.insert(cloud.end(), curve.begin(), curve.end());
  }
  return cloud;
}

LowerHull lower_convex_hull(EpigraphCloud cloud) {
  std::sort(cloud.begin(), cloud.end(), [](const EpigraphPoint& a, const EpigraphPoint& b) {
    return a.u != b.u ? a.u < b.u : a.t < b.t;
  });
  // For equal u only the lowest t can sit on the lower boundary.
  EpigraphCloud pts;
  pts.reserve(cloud.size());
  for (const EpigraphPoint& p : cloud) {
    if (!pts.empty() && pts.back().u == p.u) continue;
    pts.push_back(p);
  }
  if (pts.size() < 2) throw degenerate_hull_error("lower_convex_hull: fewer than 2 distinct u");

  std::vector<EpigraphPoint> hull;
  hull.reserve(pts.size());
  for (const EpigraphPoint& p : pts) {
    while (hull.size() >= 2) {
      const EpigraphPoint& o = hull[hull.size() - 2];
      const EpigraphPoint& a = hull[hull.size() - 1];
      double cross = (a.u - o.u) * (p.t - o.t) - (a.t - o.t) * (p.u - o.u);
      if (cross <= 0.0)
        hull.pop_back();  // a lies on or above segment o->p
      else
        break;
    }
    hull.push_back(p);
  }
  return {std::move(hull)};
}

double tangent_slope_at_zero(const LowerHull& hull) {
  const auto& v = hull.vertices;
  if (v.size() < 2) throw degenerate_hull_error("tangent_slope_at_zero: hull too small");
  if (v.front().u >= 0.0)
    throw constraint_infeasible_error(
        "tangent_slope_at_zero: boundary lies right of u=0 (eta inconsistent with data)");
  if (v.back().u < 0.0)
    throw constraint_infeasible_error(
        "tangent_slope_at_zero: boundary lies left of u=0 (eta inconsistent with data)");

  std::size_t i = 1;
  while (v[i].u < 0.0) ++i;
  // v[i-1].u < 0 <= v[i].u; a vertex exactly at zero takes its left edge.
  double m = (v[i].t - v[i - 1].t) / (v[i].u - v[i - 1].u);
  if (!(m < 0.0))
    throw geometry_error("tangent_slope_at_zero: nonnegative slope at u=0 (eta too large)");
  return m;
}

}  // namespace alma
