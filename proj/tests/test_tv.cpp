#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "alma/tv.hpp"
#include "oracles.hpp"

using namespace alma;

namespace {

ComplexImage image2x2() {
  ComplexImage x(2, 2);
  x(0, 0) = 0.0;
  x(0, 1) = 1.0;
  x(1, 0) = 2.0;
  x(1, 1) = 3.0;
  return x;
}

}  // namespace

TEST_CASE("gradient of a constant image vanishes") {
  ComplexImage x(5, 4, cplx(2.5, -1.0));
  GradientField g = gradient(x);
  CHECK(norm2(g) == 0.0);
  CHECK(g.h.rows() == 5);
  CHECK(g.h.cols() == 3);
  CHECK(g.v.rows() == 4);
  CHECK(g.v.cols() == 4);
}

TEST_CASE("gradient of the 2x2 ramp") {
  GradientField g = gradient(image2x2());
  CHECK(g.h(0, 0) == cplx(1.0, 0.0));
  CHECK(g.h(1, 0) == cplx(1.0, 0.0));
  CHECK(g.v(0, 0) == cplx(2.0, 0.0));
  CHECK(g.v(0, 1) == cplx(2.0, 0.0));
}

TEST_CASE("gradient rejects degenerate images") {
  CHECK_THROWS_AS(gradient(ComplexImage(1, 8)), shape_error);
  CHECK_THROWS_AS(gradient(ComplexImage(8, 1)), shape_error);
}

TEST_CASE("divergence is the negative adjoint of gradient") {
  std::mt19937_64 rng(21);
  for (auto [r, c] : {std::pair{5, 5}, std::pair{7, 6}}) {
    ComplexImage x = oracles::random_image(r, c, rng);
    GradientField g;
    g.h = oracles::random_image(r, c - 1, rng);
    g.v = oracles::random_image(r - 1, c, rng);
    double lhs = dot_real(gradient(x), g);
    double rhs = dot_real(x, divergence(g));
    CHECK(std::abs(lhs + rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("divergence of the zero field is zero") {
  GradientField g(6, 6);
  CHECK(norm2(divergence(g)) == 0.0);
}

TEST_CASE("divergence matches the dense transpose on 3x3") {
  std::mt19937_64 rng(22);
  const int n = 3;
  Eigen::MatrixXd D = oracles::dense_gradient_matrix(n, n);
  GradientField g;
  g.h = oracles::random_image(n, n - 1, rng);
  g.v = oracles::random_image(n - 1, n, rng);
  Eigen::VectorXcd gd = oracles::flatten(g);
  Eigen::VectorXcd want = -(D.transpose() * gd);
  ComplexImage got = divergence(g);
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(std::abs(got.data()[i] - want(static_cast<Eigen::Index>(i))) <= 1e-12);
}

TEST_CASE("tv_value examples") {
  CHECK(tv_value(ComplexImage(4, 4, cplx(3.0, 1.0))) == 0.0);
  CHECK(tv_value(image2x2()) == doctest::Approx(6.0));
}

TEST_CASE("tv_value invariances") {
  std::mt19937_64 rng(23);
  ComplexImage x = oracles::random_image(6, 8, rng);
  double base = tv_value(x);

  ComplexImage shifted = x;
  for (cplx& v : shifted) v += cplx(4.2, -0.7);
  CHECK(tv_value(shifted) == doctest::Approx(base).epsilon(1e-12));

  for (double a : {2.0, -0.3, 0.0}) {
    ComplexImage sc = x;
    scale(sc, a);
    CHECK(tv_value(sc) == doctest::Approx(std::abs(a) * base).epsilon(1e-12));
  }
}

TEST_CASE("soft threshold on scalars") {
  CHECK(soft_threshold(cplx(3.0, 0.0), 1.0) == cplx(2.0, 0.0));
  CHECK(soft_threshold(cplx(0.5, -0.2), 1.0) == cplx(0.0, 0.0));
  CHECK(soft_threshold(cplx(-1.5, 2.5), 1.0) == cplx(-0.5, 1.5));
  CHECK(soft_threshold(cplx(-1.5, 2.5), 0.0) == cplx(-1.5, 2.5));
}

TEST_CASE("soft threshold is the prox of the separable l1, vs grid search") {
  // For each part: s(v) minimizes kappa*|z| + 0.5*(z - v)^2.
  const double step = 1e-6;
  for (auto [v, kappa] : {std::pair{1.7, 0.6}, std::pair{-0.4, 0.9}, std::pair{0.0, 0.5},
                          std::pair{2.0, 0.0}, std::pair{-3.1, 3.0}}) {
    double best_z = -5.0, best_f = 1e300;
    for (double z = -5.0; z <= 5.0; z += step) {
      double f = kappa * std::abs(z) + 0.5 * (z - v) * (z - v);
      if (f < best_f) {
        best_f = f;
        best_z = z;
      }
    }
    double s = soft_threshold(cplx(v, 0.0), kappa).real();
    double fs = kappa * std::abs(s) + 0.5 * (s - v) * (s - v);
    CHECK(fs <= best_f + 1e-12);       // the closed form is at least as good
    CHECK(std::abs(s - best_z) <= 2 * step);
  }
}

TEST_CASE("soft threshold rejects negative kappa") {
  GradientField g(4, 4);
  CHECK_THROWS_AS(soft_threshold(g, -0.1), std::domain_error);
}
