#pragma once

#include <vector>

#include "alma/image.hpp"

namespace alma {

/// Set of acquired phase-encode lines (rows of the centered k-space grid).
/// Indices are 0-based and sorted; serialized forms are 1-based.
struct SamplingMask {
  int n_lines = 0;
  std::vector<int> acquired;

  static SamplingMask full(int n_lines) {
    SamplingMask m;
    m.n_lines = n_lines;
    m.acquired.resize(n_lines);
    for (int i = 0; i < n_lines; ++i) m.acquired[i] = i;
    return m;
  }

  int count() const noexcept { return static_cast<int>(acquired.size()); }
  void validate() const;
};

/// Per-coil complex sensitivity maps, all with the target image shape.
struct CoilSensitivities {
  std::vector<ComplexImage> maps;

  int count() const noexcept { return static_cast<int>(maps.size()); }
  int rows() const { return maps.empty() ? 0 : maps.front().rows(); }
  int cols() const { return maps.empty() ? 0 : maps.front().cols(); }

  /// Pointwise sum of squared magnitudes over coils.
  RealImage rss_squared() const;
};

/// Sampled k-space values restricted to acquired lines, stored per coil as
/// contiguous |acquired| x cols blocks.
struct MultiCoilKSpace {
  SamplingMask mask;
  int cols = 0;
  int n_coils = 0;
  std::vector<cplx> data;  // [coil][line][col]

  MultiCoilKSpace() = default;
  MultiCoilKSpace(SamplingMask m, int cols_, int n_coils_)
      : mask(std::move(m)),
        cols(cols_),
        n_coils(n_coils_),
        data(static_cast<std::size_t>(mask.count()) * cols_ * n_coils_, cplx(0.0, 0.0)) {}

  std::size_t samples_per_coil() const noexcept {
    return static_cast<std::size_t>(mask.count()) * cols;
  }
  std::span<cplx> coil(int k) noexcept {
    return {data.data() + k * samples_per_coil(), samples_per_coil()};
  }
  std::span<const cplx> coil(int k) const noexcept {
    return {data.data() + k * samples_per_coil(), samples_per_coil()};
  }
  std::span<const cplx> flat() const noexcept { return {data.data(), data.size()}; }
  std::span<cplx> flat() noexcept { return {data.data(), data.size()}; }

  bool same_layout(const MultiCoilKSpace& o) const noexcept {
    return cols == o.cols && n_coils == o.n_coils && mask.n_lines == o.mask.n_lines &&
           mask.acquired == o.mask.acquired;
  }
};

inline double norm2(const MultiCoilKSpace& y) { return norm2(y.flat()); }
inline double norm2_sq(const MultiCoilKSpace& y) { return norm2_sq(y.flat()); }
inline double dot_real(const MultiCoilKSpace& a, const MultiCoilKSpace& b) {
  if (!a.same_layout(b)) throw shape_error("dot_real: k-space layout mismatch");
  return dot_real(a.flat(), b.flat());
}

/// A x = [rows of F(C_k . x) selected by the mask]_k
MultiCoilKSpace forward(const ComplexImage& x, const CoilSensitivities& C, const SamplingMask& U);

/// A^H y = sum_k conj(C_k) . F^{-1}(zero-fill(y_k))
ComplexImage adjoint(const MultiCoilKSpace& y, const CoilSensitivities& C);

/// Zero-filled reconstruction with sensitivity-weighted coil combination:
/// adjoint(b) / rss_squared where the sum of squares exceeds 1e-8, else 0.
ComplexImage gridded_recon(const MultiCoilKSpace& b, const CoilSensitivities& C);

/// Matrix-free measurement operator A = U F C bound to one coil set and mask.
class MriOperator {
public:
  MriOperator(const CoilSensitivities& coils, const SamplingMask& mask)
      : coils_(&coils), mask_(&mask) {}

  MultiCoilKSpace apply(const ComplexImage& x) const { return forward(x, *coils_, *mask_); }
  ComplexImage apply_adjoint(const MultiCoilKSpace& y) const { return adjoint(y, *coils_); }

  const CoilSensitivities& coils() const noexcept { return *coils_; }
  const SamplingMask& mask() const noexcept { return *mask_; }
  int rows() const { return coils_->rows(); }
  int cols() const { return coils_->cols(); }

private:
  const CoilSensitivities* coils_;
  const SamplingMask* mask_;
};

}  // namespace alma
