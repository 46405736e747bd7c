#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "alma/phantom.hpp"
#include "alma/solvers.hpp"
#include "oracles.hpp"

using namespace alma;

namespace {

CoilSensitivities uniform_coils(int n) {
  CoilSensitivities C;
  C.maps.push_back(ComplexImage(n, n, cplx(1.0, 0.0)));
  return C;
}

struct DenseCase {
  CoilSensitivities C;
  SamplingMask U;
  Eigen::MatrixXcd A;
};

// 8x8 two-coil instance with 3 sampled lines: genuinely underdetermined, so
// the least-squares solution set is an affine subspace.
DenseCase make_dense_case() {
  DenseCase d;
  d.C = simulate_coils(8, 2);
  d.U.n_lines = 8;
  d.U.acquired = {0, 3, 4};
  d.A = oracles::dense_forward_matrix(d.C, d.U);
  return d;
}

}  // namespace

TEST_CASE("solve_least_squares inverts a unitary operator") {
  std::mt19937_64 rng(61);
  const int n = 16;
  ComplexImage f = oracles::random_image(n, n, rng);
  CoilSensitivities C = uniform_coils(n);
  SamplingMask U = SamplingMask::full(n);
  MriOperator A(C, U);
  MultiCoilKSpace b = A.apply(f);
  SolverConfig cfg;
  LsqResult r = solve_least_squares(A, b, cfg);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err += std::norm(r.x.data()[i] - f.data()[i]);
  CHECK(std::sqrt(err) <= 1e-8 * norm2(f));
  CHECK(r.residual_norm <= 1e-8 * norm2(b));
}

TEST_CASE("solve_least_squares of zero data is zero") {
  const int n = 8;
  CoilSensitivities C = simulate_coils(n, 2);
  SamplingMask U = draw_trajectory({n, 0.5, 0.3, 2});
  MriOperator A(C, U);
  MultiCoilKSpace b(U, n, 2);
  LsqResult r = solve_least_squares(A, b, SolverConfig{});
  CHECK(norm2(r.x) == 0.0);
}

TEST_CASE("dense oracle: minimum-norm least-squares solution on 8x8") {
  std::mt19937_64 rng(67);
  DenseCase d = make_dense_case();
  MriOperator A(d.C, d.U);
  ComplexImage f = oracles::random_image(8, 8, rng);
  MultiCoilKSpace b = A.apply(f);

  LsqResult r = solve_least_squares(A, b, SolverConfig{});
  Eigen::VectorXcd want =
      oracles::pinv_project(d.A, oracles::flatten(b), Eigen::VectorXcd::Zero(64));
  Eigen::VectorXcd got = oracles::flatten(r.x);
  CHECK((got - want).norm() <= 1e-8 * want.norm());
}

TEST_CASE("projection onto the least-squares set matches the dense pseudoinverse") {
  std::mt19937_64 rng(71);
  DenseCase d = make_dense_case();
  MriOperator A(d.C, d.U);
  ComplexImage f = oracles::random_image(8, 8, rng);
  MultiCoilKSpace b = A.apply(f);
  // Perturb b so it leaves the range and the problem has a true residual.
  std::normal_distribution<double> g;
  for (cplx& v : b.data) v += 0.1 * cplx(g(rng), g(rng));

  ComplexImage x = oracles::random_image(8, 8, rng);
  LsqResult r = project_onto_lsq_set(x, A, b, SolverConfig{});
  Eigen::VectorXcd want = oracles::pinv_project(d.A, oracles::flatten(b), oracles::flatten(x));
  CHECK((oracles::flatten(r.x) - want).norm() <= 1e-7 * std::max(1.0, want.norm()));
}

TEST_CASE("projection is idempotent and fixes least-squares solutions") {
  std::mt19937_64 rng(73);
  DenseCase d = make_dense_case();
  MriOperator A(d.C, d.U);
  MultiCoilKSpace b = A.apply(oracles::random_image(8, 8, rng));
  SolverConfig cfg;

  ComplexImage x = oracles::random_image(8, 8, rng);
  LsqResult once = project_onto_lsq_set(x, A, b, cfg);
  LsqResult twice = project_onto_lsq_set(once.x, A, b, cfg);
  double diff = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    diff += std::norm(twice.x.data()[i] - once.x.data()[i]);
  CHECK(std::sqrt(diff) <= 10 * cfg.cg_tol * std::max(1.0, norm2(once.x)));
}

TEST_CASE("projection from zero agrees with solve_least_squares") {
  std::mt19937_64 rng(79);
  DenseCase d = make_dense_case();
  MriOperator A(d.C, d.U);
  MultiCoilKSpace b = A.apply(oracles::random_image(8, 8, rng));
  SolverConfig cfg;
  LsqResult a = solve_least_squares(A, b, cfg);
  LsqResult p = project_onto_lsq_set(ComplexImage(8, 8, cplx(0.0, 0.0)), A, b, cfg);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) diff += std::norm(a.x.data()[i] - p.x.data()[i]);
  CHECK(std::sqrt(diff) <= 10 * cfg.cg_tol * std::max(1.0, norm2(a.x)));
}

TEST_CASE("cg raises an iteration-limit error with the residual attached") {
  DenseCase d = make_dense_case();
  MriOperator A(d.C, d.U);
  std::mt19937_64 rng(83);
  MultiCoilKSpace b = A.apply(oracles::random_image(8, 8, rng));
  SolverConfig cfg;
  cfg.cg_max_iter = 1;
  cfg.cg_tol = 1e-14;
  try {
    solve_least_squares(A, b, cfg);
    FAIL("expected iteration_limit_error");
  } catch (const iteration_limit_error& e) {
    CHECK(e.iterations() == 1);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("admm rejects nonpositive lambda") {
  DenseCase d = make_dense_case();
  MriOperator A(d.C, d.U);
  MultiCoilKSpace b(d.U, 8, 2);
  CHECK_THROWS_AS(admm_tv_lasso(A, b, 0.0, SolverConfig{}), std::domain_error);
  CHECK_THROWS_AS(admm_tv_lasso(A, b, -1.0, SolverConfig{}), std::domain_error);
}

TEST_CASE("admm at vanishing lambda approaches the least-squares solution") {
  std::mt19937_64 rng(89);
  const int n = 16;
  CoilSensitivities C = uniform_coils(n);
  SamplingMask U = SamplingMask::full(n);
  MriOperator A(C, U);
  MultiCoilKSpace b = A.apply(oracles::random_image(n, n, rng));

  SolverConfig cfg;
  cfg.admm_tol = 1e-10;
  cfg.admm_max_iter = 4000;
  AdmmResult r = admm_tv_lasso(A, b, 1e-12, cfg);
  double obj_ls = 0.0;  // unitary A: the least-squares objective is zero
  CHECK(r.objective - obj_ls <= 1e-6);
}

TEST_CASE("admm at huge lambda flattens the image") {
  const int n = 32;
  ComplexImage f = shepp_logan(n);
  CoilSensitivities C = simulate_coils(n, 2);
  SamplingMask U = draw_trajectory({n, 0.6, 0.3, 19});
  MriOperator A(C, U);
  MultiCoilKSpace b = A.apply(f);

  SolverConfig cfg;
  cfg.admm_max_iter = 2000;
  cfg.admm_tol = 1e-8;
  AdmmResult r = admm_tv_lasso(A, b, 1e6, cfg);
  CHECK(tv_value(r.x) <= 1e-3 * tv_value(f));
}

TEST_CASE("admm objective never exceeds the objective at its starting point") {
  std::mt19937_64 rng(97);
  DenseCase d = make_dense_case();
  MriOperator A(d.C, d.U);
  MultiCoilKSpace b = A.apply(oracles::random_image(8, 8, rng));
  for (cplx& v : b.data) v += 0.05 * cplx(1.0, -1.0);
  SolverConfig cfg;
  cfg.admm_max_iter = 50;
  for (double lambda : {1e-3, 0.1, 1.0, 50.0}) {
    ComplexImage x0 = gridded_recon(b, A.coils());
    double before = tv_lasso_objective(A, b, lambda, x0);
    AdmmResult r = admm_tv_lasso(A, b, lambda, cfg, x0);
    CHECK(r.objective <= before * (1.0 + 1e-12));
    CHECK(tv_lasso_objective(A, b, lambda, r.x) == doctest::Approx(r.objective).epsilon(1e-9));
  }
}

TEST_CASE("admm matches the FISTA oracle objective on an 8x8 dense instance") {
  std::mt19937_64 rng(101);
  DenseCase d = make_dense_case();
  MriOperator A(d.C, d.U);
  ComplexImage f = oracles::random_image(8, 8, rng);
  MultiCoilKSpace b = A.apply(f);
  std::normal_distribution<double> g;
  for (cplx& v : b.data) v += 0.2 * cplx(g(rng), g(rng));

  const double lambda = 0.5;
  SolverConfig cfg;
  cfg.admm_max_iter = 3000;
  cfg.admm_tol = 1e-10;
  AdmmResult r = admm_tv_lasso(A, b, lambda, cfg);
  double ref = oracles::fista_tv_lasso_objective(d.A, oracles::flatten(b), lambda, 8, 8);
  CHECK(r.objective <= ref * (1.0 + 1e-4));
  CHECK(r.objective >= ref * (1.0 - 1e-4));
}

TEST_CASE("admm identity-like denoising matches the oracle across lambdas") {
  std::mt19937_64 rng(103);
  const int n = 8;
  CoilSensitivities C = uniform_coils(n);
  SamplingMask U = SamplingMask::full(n);
  MriOperator A(C, U);
  Eigen::MatrixXcd Ad = oracles::dense_forward_matrix(C, U);
  MultiCoilKSpace b = A.apply(oracles::random_image(n, n, rng));

  SolverConfig cfg;
  cfg.admm_max_iter = 3000;
  cfg.admm_tol = 1e-10;
  for (double lambda : {0.1, 1.0}) {
    AdmmResult r = admm_tv_lasso(A, b, lambda, cfg);
    double ref = oracles::fista_tv_lasso_objective(Ad, oracles::flatten(b), lambda, n, n);
    CHECK(std::abs(r.objective - ref) <= 1e-4 * std::abs(ref));
  }
}

TEST_CASE("admm subgradient certificate on the dense instance") {
  // By prox optimality, s = (2 rho / lambda) u is an exact subgradient of
  // |.|_1 at z; with z ~ D x at convergence, clamping s into the
  // subdifferential at D x and forming A^H(Ax-b) + (lambda/2) D^T s gives a
  // near-zero subgradient of the full objective.
  std::mt19937_64 rng(107);
  DenseCase d = make_dense_case();
  MriOperator A(d.C, d.U);
  MultiCoilKSpace b = A.apply(oracles::random_image(8, 8, rng));
  const double lambda = 0.8;
  SolverConfig cfg;
  cfg.admm_max_iter = 8000;
  cfg.admm_tol = 1e-12;
  cfg.cg_tol = 1e-12;
  AdmmState state;
  ComplexImage x0 = gridded_recon(b, A.coils());
  admm_tv_lasso(A, b, lambda, cfg, x0, &state);

  Eigen::MatrixXd D = oracles::dense_gradient_matrix(8, 8);
  Eigen::VectorXcd x = oracles::flatten(state.x);
  Eigen::VectorXcd grad_fid = d.A.adjoint() * (d.A * x - oracles::flatten(b));
  Eigen::VectorXcd dx = D * x;
  Eigen::VectorXcd s = oracles::flatten(state.u) * (2.0 * state.rho / lambda);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    double sr = std::clamp(s(i).real(), -1.0, 1.0);
    double si = std::clamp(s(i).imag(), -1.0, 1.0);
    if (std::abs(dx(i).real()) > 1e-7) sr = dx(i).real() > 0 ? 1.0 : -1.0;
    if (std::abs(dx(i).imag()) > 1e-7) si = dx(i).imag() > 0 ? 1.0 : -1.0;
    s(i) = cplx(sr, si);
  }
  Eigen::VectorXcd g = grad_fid + 0.5 * lambda * D.transpose() * s;
  double scale = (d.A.adjoint() * oracles::flatten(b)).norm();
  CHECK(g.norm() <= 1e-3 * scale);
}
