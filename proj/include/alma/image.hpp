#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "alma/errors.hpp"

namespace alma {

using cplx = std::complex<double>;

/// Dense 2-D grid with row-major storage. Used for both image-domain and
/// k-space data (`KSpaceGrid` below) as well as real-valued maps.
template <class T>
class Grid2D {
public:
  Grid2D() = default;
  Grid2D(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {
    if (rows <= 0 || cols <= 0) throw shape_error("Grid2D: dimensions must be positive");
  }
  Grid2D(int rows, int cols, T fill)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows <= 0 || cols <= 0) throw shape_error("Grid2D: dimensions must be positive");
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int i, int j) noexcept { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const noexcept {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> flat() noexcept { return {data_.data(), data_.size()}; }
  std::span<const T> flat() const noexcept { return {data_.data(), data_.size()}; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool same_shape(const Grid2D& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using ComplexImage = Grid2D<cplx>;
using KSpaceGrid = ComplexImage;  // same shape as the image it transforms
using RealImage = Grid2D<double>;
using BoolImage = Grid2D<std::uint8_t>;

inline void require_same_shape(const ComplexImage& a, const ComplexImage& b, const char* where) {
  if (!a.same_shape(b)) throw shape_error(std::string(where) + ": shape mismatch");
}

// ---------------------------------------------------------------------------
// Real-vector-space view of complex arrays. All norms and solver inner
// products identify C^d with R^{2d}: |y|_p^p = sum |Re y_j|^p + |Im y_j|^p.
// ---------------------------------------------------------------------------

/// Re(a^T b) without conjugation. Symmetric and bilinear over real scalars;
/// this is not the R^{2d} inner product (see dot_real for that).
inline double inner_re(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw shape_error("inner_re: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
  return s;
}

/// The R^{2d} inner product of stacked real/imag parts, i.e. Re(conj(a)^T b).
inline double dot_real(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw shape_error("dot_real: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s;
}

inline double norm2_sq(std::span<const cplx> y) {
  double s = 0.0;
  for (const cplx& v : y) s += v.real() * v.real() + v.imag() * v.imag();
  return s;
}

inline double norm2(std::span<const cplx> y) { return std::sqrt(norm2_sq(y)); }

/// p-norm on the stacked real/imag vector. p = 1 and p = 2 are the cases
/// used in practice; other positive p are accepted.
inline double norm_p(std::span<const cplx> y, double p) {
  if (p <= 0.0) throw std::domain_error("norm_p: p must be positive");
  if (p == 2.0) return norm2(y);
  double s = 0.0;
  if (p == 1.0) {
    for (const cplx& v : y) s += std::abs(v.real()) + std::abs(v.imag());
    return s;
  }
  for (const cplx& v : y) s += std::pow(std::abs(v.real()), p) + std::pow(std::abs(v.imag()), p);
  return std::pow(s, 1.0 / p);
}

inline double inner_re(const ComplexImage& a, const ComplexImage& b) {
  return inner_re(a.flat(), b.flat());
}
inline double dot_real(const ComplexImage& a, const ComplexImage& b) {
  return dot_real(a.flat(), b.flat());
}
inline double norm2(const ComplexImage& a) { return norm2(a.flat()); }
inline double norm2_sq(const ComplexImage& a) { return norm2_sq(a.flat()); }

// Elementwise helpers shared by the iterative solvers.

inline void axpy(double alpha, const ComplexImage& x, ComplexImage& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] += alpha * x.data()[i];
}

/// out = a*x + b*y
inline void lincomb(double a, const ComplexImage& x, double b, const ComplexImage& y,
                    ComplexImage& out) {
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a * x.data()[i] + b * y.data()[i];
}

inline void scale(ComplexImage& x, double alpha) {
  for (cplx& v : x) v *= alpha;
}

inline bool all_finite(const ComplexImage& x) {
  for (const cplx& v : x)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

inline RealImage magnitude(const ComplexImage& x) {
  RealImage out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = std::abs(x.data()[i]);
  return out;
}

inline double max_value(const RealImage& x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  return m;
}

}  // namespace alma
