#include "alma/lcurve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "alma/tv.hpp"

namespace alma {

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw config_error("log_grid: invalid range");
  const double llo = std::log10(lo), lhi = std::log10(hi);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    double e = (llo * (n - 1 - i) + lhi * i) / (n - 1);
    g[i] = std::pow(10.0, e);
  }
  return g;
}

int lcurve_corner_index(const std::vector<LCurvePoint>& points) {
  if (points.size() < 3) throw config_error("lcurve: need at least 3 points");
  double best = 1e-9;  // curvature at rounding-noise level is no corner
  int best_i = -1;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const double x0 = points[i - 1].log_residual, x1 = points[i].log_residual,
                 x2 = points[i + 1].log_residual;
    const double y0 = points[i - 1].log_tv, y1 = points[i].log_tv, y2 = points[i + 1].log_tv;
    const double dx = 0.5 * (x2 - x0), dy = 0.5 * (y2 - y0);
    const double ddx = x2 - 2.0 * x1 + x0, ddy = y2 - 2.0 * y1 + y0;
    const double denom = std::pow(dx * dx + dy * dy, 1.5);
    if (denom == 0.0) continue;
    // Traversed with lambda ascending the curve runs right and down; a
    // corner turns counterclockwise, so it has positive signed curvature.
    const double kappa = (dx * ddy - dy * ddx) / denom;
    if (kappa > best) {
      best = kappa;
      best_i = static_cast<int>(i);
    }
  }
  if (best_i < 0) {
    std::vector<std::array<double, 3>> curve;
    curve.reserve(points.size());
    for (const LCurvePoint& p : points) curve.push_back({p.lambda, p.log_residual, p.log_tv});
    throw no_corner_error("lcurve: no corner (curvature never positive)", std::move(curve));
  }
  return best_i;
}

LCurveResult lcurve_select(const MriOperator& A, const MultiCoilKSpace& b,
                           std::vector<double> lambda_grid, const SolverConfig& cfg) {
  if (lambda_grid.size() < 3) throw config_error("lcurve_select: grid too small");
  std::sort(lambda_grid.begin(), lambda_grid.end(), std::greater<>());
  if (!(lambda_grid.back() > 0.0)) throw std::domain_error("lcurve_select: lambdas must be > 0");

  LCurveResult out;
  out.points.reserve(lambda_grid.size());
  std::vector<ComplexImage> recons;
  recons.reserve(lambda_grid.size());

  ComplexImage x0 = gridded_recon(b, A.coils());
  AdmmState state;
  for (double lambda : lambda_grid) {  // descending; warm start the neighbor
    AdmmResult r = admm_tv_lasso(A, b, lambda, cfg, x0, &state);
    MultiCoilKSpace ax = A.apply(r.x);
    double fid = 0.0;
    for (std::size_t i = 0; i < ax.data.size(); ++i) fid += std::norm(ax.data[i] - b.data[i]);
    LCurvePoint p;
    p.lambda = lambda;
    p.log_residual = 0.5 * std::log(std::max(fid, 1e-300));
    p.log_tv = std::log(std::max(tv_value(r.x), 1e-300));
    out.points.push_back(p);
    recons.push_back(std::move(r.x));
  }

  // Ascending in lambda for the curvature scan.
  std::reverse(out.points.begin(), out.points.end());
  std::reverse(recons.begin(), recons.end());

  out.corner_index = lcurve_corner_index(out.points);
  out.lambda = out.points[out.corner_index].lambda;
  out.x = std::move(recons[out.corner_index]);
  return out;
}

}  // namespace alma
