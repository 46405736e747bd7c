#include "alma/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace alma {
namespace {

// CG on the normal equations for min |A z - c|_2, started from z = 0.
// Terminates when |A^H (A z - c)| <= tol_abs; report_scale is only used to
// express the residual relatively in the error path.
LsqResult cgnr(const MriOperator& A, const MultiCoilKSpace& c, double tol_abs,
               double report_scale, const SolverConfig& cfg) {
  LsqResult out;
  out.x = ComplexImage(A.rows(), A.cols(), cplx(0.0, 0.0));

  MultiCoilKSpace r = c;                       // k-space residual c - A z
  ComplexImage s = A.apply_adjoint(r);         // normal-equation residual
  double gamma = norm2_sq(s);
  if (std::sqrt(gamma) <= tol_abs) {
    out.residual_norm = norm2(r);
    return out;
  }
  ComplexImage p = s;

  for (int it = 0; it < cfg.cg_max_iter; ++it) {
    MultiCoilKSpace q = A.apply(p);
    double qq = norm2_sq(q);
    if (qq == 0.0) break;  // p in the null space; only possible with gamma == 0
    double alpha = gamma / qq;
    axpy(alpha, p, out.x);
    for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] -= alpha * q.data[i];
    s = A.apply_adjoint(r);
    double gamma_new = norm2_sq(s);
    out.iterations = it + 1;
    if (std::sqrt(gamma_new) <= tol_abs) {
      out.residual_norm = norm2(r);
      return out;
    }
    double beta = gamma_new / gamma;
    for (std::size_t i = 0; i < p.size(); ++i) p.data()[i] = s.data()[i] + beta * p.data()[i];
    gamma = gamma_new;
  }
  throw iteration_limit_error("least-squares CG did not reach tolerance",
                              std::sqrt(gamma) / report_scale, cfg.cg_max_iter);
}

double adjoint_scale(const MriOperator& A, const MultiCoilKSpace& b) {
  return norm2(A.apply_adjoint(b));
}

}  // namespace

LsqResult solve_least_squares(const MriOperator& A, const MultiCoilKSpace& b,
                              const SolverConfig& cfg) {
  cfg.validate();
  double scale = adjoint_scale(A, b);
  if (scale == 0.0) {  // b orthogonal to range(A); zero is the minimum-norm solution
    LsqResult out;
    out.x = ComplexImage(A.rows(), A.cols(), cplx(0.0, 0.0));
    out.residual_norm = norm2(b);
    return out;
  }
  return cgnr(A, b, cfg.cg_tol * scale, scale, cfg);
}

LsqResult project_onto_lsq_set(const ComplexImage& x, const MriOperator& A,
                               const MultiCoilKSpace& b, const SolverConfig& cfg) {
  cfg.validate();
  if (x.rows() != A.rows() || x.cols() != A.cols())
    throw shape_error("project_onto_lsq_set: image/operator shape mismatch");
  MultiCoilKSpace c = b;
  MultiCoilKSpace ax = A.apply(x);
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] -= ax.data[i];

  double scale = adjoint_scale(A, b);
  if (scale == 0.0) scale = norm2(A.apply_adjoint(c));  // b = 0: converge relative to A^H(Ax)
  LsqResult step;
  if (scale == 0.0) {
    step.x = x;  // both b and A^H A x vanish; x is already a solution
    step.residual_norm = norm2(c);
    return step;
  }
  step = cgnr(A, c, cfg.cg_tol * scale, scale, cfg);
  axpy(1.0, x, step.x);
  return step;
}

double tv_lasso_objective(const MriOperator& A, const MultiCoilKSpace& b, double lambda,
                          const ComplexImage& x) {
  MultiCoilKSpace ax = A.apply(x);
  double fid = 0.0;
  for (std::size_t i = 0; i < ax.data.size(); ++i) fid += std::norm(ax.data[i] - b.data[i]);
  return 0.5 * fid + 0.5 * lambda * tv_value(x);
}

namespace {

double l1_value(const GradientField& g) {
  double s = 0.0;
  for (const cplx& v : g.h) s += std::abs(v.real()) + std::abs(v.imag());
  for (const cplx& v : g.v) s += std::abs(v.real()) + std::abs(v.imag());
  return s;
}

// x-update system M x = A^H(A x) + rho * D^T(D x); D^T g = -divergence(g).
ComplexImage normal_op(const MriOperator& A, double rho, const ComplexImage& x) {
  ComplexImage out = A.apply_adjoint(A.apply(x));
  ComplexImage dtd = divergence(gradient(x));
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= rho * dtd.data()[i];
  return out;
}

// Warm-started CG for the SPD x-update system; runs until the relative
// residual drops below rel_tol or the iteration cap is hit (a truncated
// inner solve is acceptable inside ADMM). Throws only on non-finite values.
void xupdate_cg(const MriOperator& A, double rho, const ComplexImage& rhs, ComplexImage& x,
                double rel_tol, int max_iter) {
  double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    std::fill(x.begin(), x.end(), cplx(0.0, 0.0));
    return;
  }
  ComplexImage r = normal_op(A, rho, x);
  for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] = rhs.data()[i] - r.data()[i];
  double gamma = norm2_sq(r);
  double target = rel_tol * rhs_norm;
  if (std::sqrt(gamma) <= target) return;
  ComplexImage p = r;

  for (int it = 0; it < max_iter; ++it) {
    ComplexImage mp = normal_op(A, rho, p);
    double denom = dot_real(p, mp);
    if (denom <= 0.0 || !std::isfinite(denom))
      throw iteration_limit_error("ADMM inner CG lost positive definiteness",
                                  std::sqrt(gamma) / rhs_norm, it);
    double alpha = gamma / denom;
    axpy(alpha, p, x);
    axpy(-alpha, mp, r);
    double gamma_new = norm2_sq(r);
    if (!std::isfinite(gamma_new))
      throw iteration_limit_error("ADMM inner CG diverged", std::sqrt(gamma) / rhs_norm, it);
    if (std::sqrt(gamma_new) <= target) return;
    double beta = gamma_new / gamma;
    for (std::size_t i = 0; i < p.size(); ++i) p.data()[i] = r.data()[i] + beta * p.data()[i];
    gamma = gamma_new;
  }
}

}  // namespace

AdmmResult admm_tv_lasso(const MriOperator& A, const MultiCoilKSpace& b, double lambda,
                         const SolverConfig& cfg, const ComplexImage& x_init,
                         AdmmState* state) {
  cfg.validate();
  if (!(lambda > 0.0)) throw std::domain_error("admm_tv_lasso: lambda must be positive");
  if (x_init.rows() != A.rows() || x_init.cols() != A.cols())
    throw shape_error("admm_tv_lasso: image/operator shape mismatch");

  const ComplexImage ahb = A.apply_adjoint(b);
  const double ahb_norm = std::max(norm2(ahb), 1e-300);

  ComplexImage x;
  GradientField z, u;
  double rho = cfg.admm_rho;
  if (state && state->valid && state->x.same_shape(x_init)) {
    x = state->x;
    z = state->z;
    u = state->u;
    rho = state->rho;
    if (state->lambda > 0.0) {
      // The unscaled dual tracks a subgradient of (lambda/2)|.|_1; rescale.
      double f = lambda / state->lambda;
      for (cplx& v : u.h) v *= f;
      for (cplx& v : u.v) v *= f;
    }
  } else {
    x = x_init;
    z = gradient(x);
    u = GradientField(x.rows(), x.cols());
  }

  AdmmResult best;
  best.x = x;
  best.objective = tv_lasso_objective(A, b, lambda, x);

  double primal_rel = 1.0, dual_rel = 1.0;
  GradientField z_prev = z;

  for (int it = 1; it <= cfg.admm_max_iter; ++it) {
    // x-update: (A^H A + rho D^T D) x = A^H b + rho D^T (z - u)
    GradientField zu = z;
    for (std::size_t i = 0; i < zu.h.size(); ++i) zu.h.data()[i] -= u.h.data()[i];
    for (std::size_t i = 0; i < zu.v.size(); ++i) zu.v.data()[i] -= u.v.data()[i];
    ComplexImage rhs = divergence(zu);
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs.data()[i] = ahb.data()[i] - rho * rhs.data()[i];

    double inner_tol = std::clamp(0.1 * std::min(primal_rel, dual_rel), cfg.cg_tol, 1e-4);
    xupdate_cg(A, rho, rhs, x, inner_tol, cfg.cg_max_iter);

    GradientField dx = gradient(x);

    // Track the best iterate seen; ADMM itself is not monotone in the objective.
    {
      MultiCoilKSpace ax = A.apply(x);
      double fid = 0.0;
      for (std::size_t i = 0; i < ax.data.size(); ++i) fid += std::norm(ax.data[i] - b.data[i]);
      double obj = 0.5 * fid + 0.5 * lambda * l1_value(dx);
      if (obj < best.objective) {
        best.objective = obj;
        best.x = x;
      }
    }

    // z-update: prox of (lambda/2)/rho * |.|_1 at D x + u
    z_prev = z;
    z = dx;
    for (std::size_t i = 0; i < z.h.size(); ++i) z.h.data()[i] += u.h.data()[i];
    for (std::size_t i = 0; i < z.v.size(); ++i) z.v.data()[i] += u.v.data()[i];
    soft_threshold(z, 0.5 * lambda / rho);

    // u-update and residuals
    GradientField pr = dx;
    for (std::size_t i = 0; i < pr.h.size(); ++i) pr.h.data()[i] -= z.h.data()[i];
    for (std::size_t i = 0; i < pr.v.size(); ++i) pr.v.data()[i] -= z.v.data()[i];
    for (std::size_t i = 0; i < u.h.size(); ++i) u.h.data()[i] += pr.h.data()[i];
    for (std::size_t i = 0; i < u.v.size(); ++i) u.v.data()[i] += pr.v.data()[i];

    double primal = norm2(pr);
    GradientField dz = z;
    for (std::size_t i = 0; i < dz.h.size(); ++i) dz.h.data()[i] -= z_prev.h.data()[i];
    for (std::size_t i = 0; i < dz.v.size(); ++i) dz.v.data()[i] -= z_prev.v.data()[i];
    double dual = rho * norm2(divergence(dz));

    double primal_scale = std::max({norm2(dx), norm2(z), 1e-300});
    double dual_scale = std::max(rho * norm2(divergence(u)), ahb_norm * 1e-9);
    primal_rel = primal / primal_scale;
    dual_rel = dual / dual_scale;

    best.iterations = it;
    best.primal_residual = primal_rel;
    best.dual_residual = dual_rel;
    if (primal_rel <= cfg.admm_tol && dual_rel <= cfg.admm_tol) {
      best.converged = true;
      break;
    }

    if (cfg.admm_adapt_rho && it >= 2) {
      if (primal > 10.0 * dual && rho < 1e12) {
        rho *= 2.0;
        for (cplx& v : u.h) v *= 0.5;
        for (cplx& v : u.v) v *= 0.5;
      } else if (dual > 10.0 * primal && rho > 1e-8) {
        rho *= 0.5;
        for (cplx& v : u.h) v *= 2.0;
        for (cplx& v : u.v) v *= 2.0;
      }
    }
  }

  if (state) {
    state->x = x;
    state->z = z;
    state->u = u;
    state->rho = rho;
    state->lambda = lambda;
    state->valid = true;
  }
  return best;
}

AdmmResult admm_tv_lasso(const MriOperator& A, const MultiCoilKSpace& b, double lambda,
                         const SolverConfig& cfg) {
  ComplexImage x0 = gridded_recon(b, A.coils());
  return admm_tv_lasso(A, b, lambda, cfg, x0, nullptr);
}

}  // namespace alma
