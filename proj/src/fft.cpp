#include "alma/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace alma {
namespace {

// One cached plan per (rows, cols, sign). Plans are created with
// FFTW_ESTIMATE | FFTW_UNALIGNED so they are deterministic and valid for any
// buffer via the new-array execute interface. Plan creation is not
// thread-safe in FFTW; execution is.
class PlanCache {
public:
  fftw_plan get(int rows, int cols, int sign) {
    std::scoped_lock lock(mutex_);
    auto key = std::make_tuple(rows, cols, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::size_t n = static_cast<std::size_t>(rows) * cols;
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_2d(rows, cols, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// Copies src into dst with a circular shift of (di, dj).
void shifted_copy(const ComplexImage& src, ComplexImage& dst, int di, int dj) {
  const int r = src.rows(), c = src.cols();
  for (int i = 0; i < r; ++i) {
    int ii = i + di;
    if (ii >= r) ii -= r;
    for (int j = 0; j < c; ++j) {
      int jj = j + dj;
      if (jj >= c) jj -= c;
      dst(ii, jj) = src(i, j);
    }
  }
}

ComplexImage transform(const ComplexImage& x, int sign) {
  const int r = x.rows(), c = x.cols();
  // ifftshift: move the center sample to index 0 before the transform.
  ComplexImage work(r, c);
  shifted_copy(x, work, (r + 1) / 2, (c + 1) / 2);

  fftw_plan p = plan_cache().get(r, c, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(work.data()),
                   reinterpret_cast<fftw_complex*>(work.data()));

  // fftshift + unitary scaling.
  ComplexImage out(r, c);
  shifted_copy(work, out, r / 2, c / 2);
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  scale(out, s);
  return out;
}

}  // namespace

KSpaceGrid dft2_centered(const ComplexImage& x) { return transform(x, FFTW_FORWARD); }

ComplexImage idft2_centered(const KSpaceGrid& k) { return transform(k, FFTW_BACKWARD); }

}  // namespace alma
