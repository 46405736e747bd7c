#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "alma/fft.hpp"
#include "alma/image.hpp"
#include "oracles.hpp"

using namespace alma;

TEST_CASE("inner_re matches direct arithmetic") {
  std::vector<cplx> a = {cplx(1.0, 1.0)};
  std::vector<cplx> b = {cplx(1.0, -1.0)};
  CHECK(inner_re(std::span<const cplx>(a), std::span<const cplx>(b)) == doctest::Approx(2.0));

  // Re(i*i) = -1, while the R^{2d} norm of (i) is 1: conjugation matters.
  std::vector<cplx> c = {cplx(0.0, 1.0)};
  CHECK(inner_re(std::span<const cplx>(c), std::span<const cplx>(c)) == doctest::Approx(-1.0));
  CHECK(dot_real(std::span<const cplx>(c), std::span<const cplx>(c)) == doctest::Approx(1.0));
  CHECK(norm2_sq(std::span<const cplx>(c)) == doctest::Approx(1.0));
}

TEST_CASE("inner_re is symmetric on random vectors") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<cplx> a(16), b(16);
  for (auto& v : a) v = cplx(g(rng), g(rng));
  for (auto& v : b) v = cplx(g(rng), g(rng));
  CHECK(inner_re(std::span<const cplx>(a), std::span<const cplx>(b)) ==
        doctest::Approx(inner_re(std::span<const cplx>(b), std::span<const cplx>(a))));
}

TEST_CASE("inner_re rejects mismatched lengths") {
  std::vector<cplx> a(3), b(4);
  CHECK_THROWS_AS(inner_re(std::span<const cplx>(a), std::span<const cplx>(b)), shape_error);
}

TEST_CASE("norm_p on simple vectors") {
  std::vector<cplx> y = {cplx(3.0, 4.0)};
  CHECK(norm_p(std::span<const cplx>(y), 2.0) == doctest::Approx(5.0));
  CHECK(norm_p(std::span<const cplx>(y), 1.0) == doctest::Approx(7.0));
  std::vector<cplx> z(5, cplx(0.0, 0.0));
  CHECK(norm_p(std::span<const cplx>(z), 1.0) == 0.0);
  CHECK(norm_p(std::span<const cplx>(z), 2.0) == 0.0);
  CHECK(norm_p(std::span<const cplx>(z), 0.5) == 0.0);
}

TEST_CASE("norm_2 squared equals the stacked self inner product") {
  std::mt19937_64 rng(11);
  ComplexImage x = oracles::random_image(9, 7, rng);
  double n2 = norm2(x);
  CHECK(n2 * n2 == doctest::Approx(dot_real(x, x)).epsilon(1e-12));
}

TEST_CASE("dft2_centered of a centered impulse is flat") {
  ComplexImage x(8, 8, cplx(0.0, 0.0));
  x(4, 4) = cplx(1.0, 0.0);
  KSpaceGrid k = dft2_centered(x);
  for (const cplx& v : k) {
    CHECK(v.real() == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
    CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("dft2_centered of all-ones concentrates at the center") {
  ComplexImage x(4, 4, cplx(1.0, 0.0));
  KSpaceGrid k = dft2_centered(x);
  // Direct-sum oracle for the same grid.
  ComplexImage ref = oracles::naive_dft2_centered(x);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(k(i, j).real() == doctest::Approx(ref(i, j).real()).epsilon(1e-10));
      CHECK(k(i, j).imag() == doctest::Approx(ref(i, j).imag()).epsilon(1e-10));
    }
  CHECK(std::abs(k(2, 2)) == doctest::Approx(4.0).epsilon(1e-12));
  double off = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != 2 || j != 2) off += std::abs(k(i, j));
  CHECK(off == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("dft2_centered matches the naive oracle on random odd/even shapes") {
  std::mt19937_64 rng(3);
  for (auto [r, c] : {std::pair{5, 7}, std::pair{8, 6}, std::pair{9, 4}}) {
    ComplexImage x = oracles::random_image(r, c, rng);
    KSpaceGrid fast = dft2_centered(x);
    ComplexImage ref = oracles::naive_dft2_centered(x);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i) {
      err += std::abs(fast.data()[i] - ref.data()[i]);
      scale += std::abs(ref.data()[i]);
    }
    CHECK(err <= 1e-11 * scale);
  }
}

TEST_CASE("Parseval up to 384x384") {
  std::mt19937_64 rng(5);
  for (int n : {16, 64, 384}) {
    ComplexImage x = oracles::random_image(n, n, rng);
    double nx = norm2(x);
    CHECK(std::abs(norm2(dft2_centered(x)) - nx) <= 1e-10 * nx);
  }
}

TEST_CASE("round trip idft(dft) is the identity to 1e-12 relative") {
  std::mt19937_64 rng(9);
  ComplexImage x = oracles::random_image(33, 48, rng);
  ComplexImage back = idft2_centered(dft2_centered(x));
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) err += std::norm(back.data()[i] - x.data()[i]);
  CHECK(std::sqrt(err) <= 1e-12 * norm2(x));
}

TEST_CASE("idft2_centered of a constant grid is a centered impulse") {
  KSpaceGrid k(6, 6, cplx(1.0, 0.0));
  ComplexImage x = idft2_centered(k);
  CHECK(std::abs(x(3, 3)) == doctest::Approx(6.0).epsilon(1e-12));
  double off = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != 3 || j != 3) off += std::abs(x(i, j));
  CHECK(off <= 1e-10);
}

TEST_CASE("idft2_centered is linear") {
  std::mt19937_64 rng(13);
  KSpaceGrid k1 = oracles::random_image(10, 12, rng);
  KSpaceGrid k2 = oracles::random_image(10, 12, rng);
  const double alpha = 1.7;
  KSpaceGrid mix(10, 12);
  lincomb(alpha, k1, 1.0, k2, mix);
  ComplexImage lhs = idft2_centered(mix);
  ComplexImage a = idft2_centered(k1);
  ComplexImage b = idft2_centered(k2);
  double err = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i)
    err += std::abs(lhs.data()[i] - (alpha * a.data()[i] + b.data()[i]));
  CHECK(err <= 1e-10);
}
