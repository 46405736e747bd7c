#pragma once

#include "alma/image.hpp"

namespace alma {

/// Non-periodic forward differences of an image along both axes:
/// h(i,j) = x(i,j+1) - x(i,j) of shape rows x (cols-1),
/// v(i,j) = x(i+1,j) - x(i,j) of shape (rows-1) x cols.
struct GradientField {
  ComplexImage h;
  ComplexImage v;

  GradientField() = default;
  GradientField(int rows, int cols) : h(rows, cols - 1), v(rows - 1, cols) {}

  bool same_shape(const GradientField& o) const noexcept {
    return h.same_shape(o.h) && v.same_shape(o.v);
  }
};

GradientField gradient(const ComplexImage& x);

/// Negative adjoint of gradient: dot_real(gradient(x), g) == dot_real(x, -divergence(g)).
ComplexImage divergence(const GradientField& g);

/// Anisotropic total variation: the l1 norm (separate real/imag parts) of
/// the forward-difference gradient.
double tv_value(const ComplexImage& x);

/// Soft threshold applied independently to real and imaginary parts,
/// s(t) = sign(t) * max(|t| - kappa, 0); the proximal map of kappa*|.|_1.
void soft_threshold(GradientField& g, double kappa);
cplx soft_threshold(cplx v, double kappa);

// Field arithmetic used by the ADMM iterations.
double dot_real(const GradientField& a, const GradientField& b);
double norm2(const GradientField& a);
double norm2_sq(const GradientField& a);

}  // namespace alma
