#include "alma/tv.hpp"

namespace alma {

GradientField gradient(const ComplexImage& x) {
  if (x.rows() < 2 || x.cols() < 2)
    throw shape_error("gradient: image must be at least 2x2");
  GradientField g(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j + 1 < x.cols(); ++j) g.h(i, j) = x(i, j + 1) - x(i, j);
  for (int i = 0; i + 1 < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) g.v(i, j) = x(i + 1, j) - x(i, j);
  return g;
}

ComplexImage divergence(const GradientField& g) {
  const int rows = g.v.rows() + 1;
  const int cols = g.h.cols() + 1;
  if (g.h.rows() != rows || g.v.cols() != cols)
    throw shape_error("divergence: inconsistent field shapes");
  ComplexImage out(rows, cols, cplx(0.0, 0.0));
  // Horizontal: out(i,j) += h(i,j-1) - h(i,j) with one-sided boundaries.
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      cplx acc(0.0, 0.0);
      if (j < cols - 1) acc -= g.h(i, j);
      if (j > 0) acc += g.h(i, j - 1);
      out(i, j) = acc;
    }
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      cplx acc(0.0, 0.0);
      if (i < rows - 1) acc -= g.v(i, j);
      if (i > 0) acc += g.v(i - 1, j);
      out(i, j) += acc;
    }
  }
  // out = -(D^T g): forward differences transpose to backward differences.
  for (cplx& v : out) v = -v;
  return out;
}

double tv_value(const ComplexImage& x) {
  const GradientField g = gradient(x);
  double s = 0.0;
  for (const cplx& v : g.h) s += std::abs(v.real()) + std::abs(v.imag());
  for (const cplx& v : g.v) s += std::abs(v.real()) + std::abs(v.imag());
  return s;
}

cplx soft_threshold(cplx v, double kappa) {
  auto s = [kappa](double t) {
    double m = std::abs(t) - kappa;
    return m > 0.0 ? (t > 0.0 ? m : -m) : 0.0;
  };
  return {s(v.real()), s(v.imag())};
}

void soft_threshold(GradientField& g, double kappa) {
  if (kappa < 0.0) throw std::domain_error("soft_threshold: kappa must be nonnegative");
  for (cplx& v : g.h) v = soft_threshold(v, kappa);
  for (cplx& v : g.v) v = soft_threshold(v, kappa);
}

double dot_real(const GradientField& a, const GradientField& b) {
  return dot_real(a.h, b.h) + dot_real(a.v, b.v);
}

double norm2_sq(const GradientField& a) { return norm2_sq(a.h) + norm2_sq(a.v); }

double norm2(const GradientField& a) { return std::sqrt(norm2_sq(a)); }

}  // namespace alma
