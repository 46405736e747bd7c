#pragma once

#include "alma/image.hpp"

namespace alma {

/// Unitary 2-D DFT with the zero frequency at the grid center
/// (row rows/2, col cols/2). Norm-preserving: |F x|_2 = |x|_2.
KSpaceGrid dft2_centered(const ComplexImage& x);

/// Exact inverse of dft2_centered.
ComplexImage idft2_centered(const KSpaceGrid& k);

}  // namespace alma
