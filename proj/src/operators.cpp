#include "alma/operators.hpp"

#include <algorithm>

#include "alma/fft.hpp"

namespace alma {

void SamplingMask::validate() const {
  if (n_lines <= 0) throw config_error("SamplingMask: n_lines must be positive");
  if (acquired.empty()) throw config_error("SamplingMask: no acquired lines");
  if (!std::is_sorted(acquired.begin(), acquired.end()))
    throw config_error("SamplingMask: lines not sorted");
  if (std::adjacent_find(acquired.begin(), acquired.end()) != acquired.end())
    throw config_error("SamplingMask: duplicate lines");
  if (acquired.front() < 0 || acquired.back() >= n_lines)
    throw config_error("SamplingMask: line index out of range");
}

RealImage CoilSensitivities::rss_squared() const {
  RealImage out(rows(), cols(), 0.0);
  for (const ComplexImage& m : maps)
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += std::norm(m.data()[i]);
  return out;
}

MultiCoilKSpace forward(const ComplexImage& x, const CoilSensitivities& C, const SamplingMask& U) {
  if (C.count() == 0) throw shape_error("forward: no coils");
  if (C.rows() != x.rows() || C.cols() != x.cols())
    throw shape_error("forward: coil/image shape mismatch");
  if (U.n_lines != x.rows()) throw shape_error("forward: mask/image row mismatch");

  MultiCoilKSpace y(U, x.cols(), C.count());
  ComplexImage weighted(x.rows(), x.cols());
  for (int k = 0; k < C.count(); ++k) {
    const ComplexImage& map = C.maps[k];
    for (std::size_t i = 0; i < x.size(); ++i) weighted.data()[i] = map.data()[i] * x.data()[i];
    KSpaceGrid grid = dft2_centered(weighted);
    auto out = y.coil(k);
    for (int li = 0; li < U.count(); ++li) {
      const cplx* row = &grid(U.acquired[li], 0);
      std::copy(row, row + x.cols(), out.data() + static_cast<std::size_t>(li) * x.cols());
    }
  }
  return y;
}

ComplexImage adjoint(const MultiCoilKSpace& y, const CoilSensitivities& C) {
  if (C.count() != y.n_coils) throw shape_error("adjoint: coil count mismatch");
  if (C.cols() != y.cols || C.rows() != y.mask.n_lines)
    throw shape_error("adjoint: coil/k-space shape mismatch");

  ComplexImage acc(C.rows(), C.cols(), cplx(0.0, 0.0));
  KSpaceGrid grid(C.rows(), C.cols());
  for (int k = 0; k < y.n_coils; ++k) {
    std::fill(grid.begin(), grid.end(), cplx(0.0, 0.0));
    auto in = y.coil(k);
    for (int li = 0; li < y.mask.count(); ++li) {
      const cplx* row = in.data() + static_cast<std::size_t>(li) * y.cols;
      std::copy(row, row + y.cols, &grid(y.mask.acquired[li], 0));
    }
    ComplexImage img = idft2_centered(grid);
    const ComplexImage& map = C.maps[k];
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc.data()[i] += std::conj(map.data()[i]) * img.data()[i];
  }
  return acc;
}

ComplexImage gridded_recon(const MultiCoilKSpace& b, const CoilSensitivities& C) {
  ComplexImage x = adjoint(b, C);
  RealImage w = C.rss_squared();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w.data()[i] > 1e-8)
      x.data()[i] /= w.data()[i];
    else
      x.data()[i] = cplx(0.0, 0.0);
  }
  return x;
}

}  // namespace alma
