#include "alma/alma.hpp"

#include <cmath>
#include <utility>

namespace alma {
namespace {

struct SketchSetup {
  ComplexImage x0;       // gridded reconstruction
  ComplexImage x_sharp;  // least-squares point, leftmost reachable u
};

SketchSetup prepare(const MriOperator& A, const MultiCoilKSpace& b, const AlmaConfig& cfg,
                    const SolverConfig& solver_cfg) {
  SketchSetup s;
  s.x0 = gridded_recon(b, A.coils());
  LsqResult lsq = solve_least_squares(A, b, solver_cfg);
  if (lsq.residual_norm >= cfg.eta)
    throw constraint_infeasible_error(
        "alma: infeasible constraint bound eta (" + std::to_string(cfg.eta) +
        "): it does not exceed the least-squares residual (" +
        std::to_string(lsq.residual_norm) + ")");
  s.x_sharp = std::move(lsq.x);
  return s;
}

}  // namespace

AlmaResult alma_run(const MriOperator& A, const MultiCoilKSpace& b, const AlmaConfig& cfg,
                    const SolverConfig& solver_cfg) {
  cfg.validate();
  solver_cfg.validate();
  SketchSetup setup = prepare(A, b, cfg, solver_cfg);

  AlmaResult out;
  EpigraphCloud carried;  // hull vertices accumulated across iterations
  ComplexImage x_prev = std::move(setup.x0);
  double lambda_prev = 0.0;
  AdmmState admm_state;

  for (int n = 1; n <= cfg.n_max; ++n) {
    // Iteration 1 sketches the segment from the gridded start to the
    // least-squares point; later iterations re-project the latest
    // reconstruction onto the least-squares solution set.
    ComplexImage x_proj =
        (n == 1) ? std::move(setup.x_sharp)
                 : project_onto_lsq_set(x_prev, A, b, solver_cfg).x;

    EpigraphCloud cloud = sketch_segment(x_prev, x_proj, A, b, cfg.eta, cfg.n_tau, cfg.n_alpha);
    cloud.insert(cloud.end(), carried.begin(), carried.end());
    LowerHull hull = lower_convex_hull(std::move(cloud));
    carried = hull.vertices;

    double m = tangent_slope_at_zero(hull);
    double lambda = -1.0 / m;

    AdmmResult rec = admm_tv_lasso(A, b, lambda, solver_cfg, x_prev, &admm_state);

    out.trace.iterations.push_back({n, lambda, m, static_cast<int>(hull.vertices.size()),
                                    rec.iterations, rec.objective});
    out.lambda = lambda;
    out.x = std::move(rec.x);

    if (n > 1 && std::abs(lambda - lambda_prev) <= cfg.lambda_rel_tol * lambda_prev) {
      out.converged = true;
      break;
    }
    lambda_prev = lambda;
    x_prev = out.x;
  }
  return out;
}

double alma_initial_lambda(const MriOperator& A, const MultiCoilKSpace& b,
                           const AlmaConfig& cfg, const SolverConfig& solver_cfg) {
  cfg.validate();
  SketchSetup setup = prepare(A, b, cfg, solver_cfg);
  EpigraphCloud cloud =
      sketch_segment(setup.x0, setup.x_sharp, A, b, cfg.eta, cfg.n_tau, cfg.n_alpha);
  return -1.0 / tangent_slope_at_zero(lower_convex_hull(std::move(cloud)));
}

}  // namespace alma
