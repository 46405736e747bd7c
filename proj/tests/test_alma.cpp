#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alma/alma.hpp"
#include "alma/phantom.hpp"
#include "oracles.hpp"

using namespace alma;

namespace {

struct Problem {
  ComplexImage f;
  CoilSensitivities C;
  SamplingMask U;
  MultiCoilKSpace b;
  double eta = 0.0;

  Problem(int n, int n_coils, double ur, double nl, std::uint64_t seed)
      : f(shepp_logan(n)),
        C(simulate_coils(n, n_coils)),
        U(draw_trajectory({n, ur, 0.3, mix_seed(seed)})),
        b(SamplingMask{}, 0, 0) {
    CorruptResult r = corrupt(forward(f, C, U), {nl, mix_seed(seed + 1)});
    b = std::move(r.b);
    eta = r.eta;
  }
};

SolverConfig fast_solver() {
  SolverConfig s;
  s.admm_max_iter = 120;
  s.admm_tol = 1e-4;
  return s;
}

AlmaConfig small_alma(double eta) {
  AlmaConfig a;
  a.n_tau = 61;
  a.n_alpha = 61;
  a.eta = eta;
  return a;
}

}  // namespace

TEST_CASE("alma converges on a 32x32 instance with a positive stabilized lambda") {
  Problem p(32, 2, 0.4, 0.05, 101);
  MriOperator A(p.C, p.U);
  AlmaResult r = alma_run(A, p.b, small_alma(p.eta), fast_solver());

  CHECK(r.converged);
  CHECK(r.lambda > 0.0);
  CHECK(static_cast<int>(r.trace.iterations.size()) <= 100);
  for (const AlmaIteration& it : r.trace.iterations) {
    CHECK(it.lambda > 0.0);
    CHECK(it.slope < 0.0);
    CHECK(it.hull_size >= 2);
    CHECK(it.lambda == doctest::Approx(-1.0 / it.slope));
  }
  CHECK(all_finite(r.x));
  // The reconstruction fits the data no worse than eta by a wide margin.
  MultiCoilKSpace ax = A.apply(r.x);
  double fid = 0.0;
  for (std::size_t i = 0; i < ax.data.size(); ++i) fid += std::norm(ax.data[i] - p.b.data[i]);
  CHECK(std::sqrt(fid) <= 10.0 * p.eta);
}

TEST_CASE("alma traces are bit-identical across reruns") {
  Problem p(32, 2, 0.4, 0.05, 202);
  MriOperator A(p.C, p.U);
  AlmaResult r1 = alma_run(A, p.b, small_alma(p.eta), fast_solver());
  AlmaResult r2 = alma_run(A, p.b, small_alma(p.eta), fast_solver());
  REQUIRE(r1.trace.iterations.size() == r2.trace.iterations.size());
  for (std::size_t i = 0; i < r1.trace.iterations.size(); ++i) {
    CHECK(r1.trace.iterations[i].lambda == r2.trace.iterations[i].lambda);
    CHECK(r1.trace.iterations[i].slope == r2.trace.iterations[i].slope);
    CHECK(r1.trace.iterations[i].objective == r2.trace.iterations[i].objective);
  }
  CHECK(r1.x == r2.x);
}

TEST_CASE("noiseless data with eta = 0 is rejected as infeasible") {
  Problem p(32, 2, 1.0, 0.0, 303);  // full sampling, no noise
  MriOperator A(p.C, p.U);
  CHECK(p.eta == 0.0);
  CHECK_THROWS_AS(alma_run(A, p.b, small_alma(0.0), fast_solver()),
                  constraint_infeasible_error);
}

TEST_CASE("merging a new cloud into the hull only lowers the boundary") {
  Problem p(32, 2, 0.5, 0.05, 404);
  MriOperator A(p.C, p.U);
  SolverConfig scfg;
  ComplexImage x0 = gridded_recon(p.b, p.C);
  LsqResult lsq = solve_least_squares(A, p.b, scfg);

  EpigraphCloud c1 = sketch_segment(x0, lsq.x, A, p.b, p.eta, 31, 31);
  LowerHull h1 = lower_convex_hull(c1);

  std::mt19937_64 rng(5);
  ComplexImage other = oracles::random_image(32, 32, rng);
  EpigraphCloud c2 = sketch_segment(other, lsq.x, A, p.b, p.eta, 31, 31);
  c2.insert(c2.end(), h1.vertices.begin(), h1.vertices.end());
  LowerHull h2 = lower_convex_hull(c2);

  auto eval = [](const LowerHull& h, double u) {
    std::size_t i = 1;
    while (i < h.vertices.size() && h.vertices[i].u < u) ++i;
    if (i == h.vertices.size()) return h.vertices.back().t;
    const EpigraphPoint& a = h.vertices[i - 1];
    const EpigraphPoint& b = h.vertices[i];
    return a.t + (b.t - a.t) * (u - a.u) / (b.u - a.u);
  };
  const double lo = std::max(h1.vertices.front().u, h2.vertices.front().u);
  const double hi = std::min(h1.vertices.back().u, h2.vertices.back().u);
  for (int k = 0; k <= 50; ++k) {
    double u = lo + (hi - lo) * k / 50.0;
    CHECK(eval(h2, u) <= eval(h1, u) + 1e-9 * (1.0 + std::abs(eval(h1, u))));
  }
}

TEST_CASE("alma_initial_lambda agrees with the first trace entry") {
  Problem p(32, 2, 0.4, 0.05, 505);
  MriOperator A(p.C, p.U);
  AlmaConfig cfg = small_alma(p.eta);
  double l0 = alma_initial_lambda(A, p.b, cfg, fast_solver());
  AlmaResult r = alma_run(A, p.b, cfg, fast_solver());
  CHECK(l0 == doctest::Approx(r.trace.iterations.front().lambda).epsilon(1e-12));
}
