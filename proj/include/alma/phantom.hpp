#pragma once

#include <cstdint>

#include "alma/operators.hpp"

namespace alma {

/// Modified Shepp-Logan head phantom rasterized on an n x n grid,
/// piecewise constant with intensities in [0, 1] (zero imaginary part).
ComplexImage shepp_logan(int n);

/// Smooth complex coil maps: Gaussian magnitude lobes centered on a circle
/// of radius 0.55*n around the grid center (width 0.45*n) with a gentle
/// linear phase per coil. The root-sum-of-squares stays above 0.05 on the
/// phantom support.
CoilSensitivities simulate_coils(int n, int n_coils);

struct TrajectorySpec {
  int n_lines = 384;
  double ur_pct = 0.1;        // fraction of lines acquired, in (0, 1]
  double center_frac = 0.30;  // fraction of acquired lines spent on the k-space center
  std::uint64_t seed = 0;
};

/// Cartesian line-undersampling pattern: ceil(n_lines*ur_pct) distinct lines;
/// a contiguous fully sampled center block of ceil(count*center_frac) lines,
/// and the rest drawn from a rounded normal with mean at the center line and
/// variance n_lines*ur_pct, redrawing duplicates and out-of-range values.
SamplingMask draw_trajectory(const TrajectorySpec& spec);

/// y = A f for the given coils and mask.
MultiCoilKSpace simulate_acquisition(const ComplexImage& f, const CoilSensitivities& C,
                                     const SamplingMask& U);

struct NoiseSpec {
  double nl_pct = 0.0;  // noise level: sigma^2 = |y|_2 * nl_pct
  std::uint64_t seed = 0;
};

struct CorruptResult {
  MultiCoilKSpace b;
  double eta = 0.0;  // realized noise norm |eps|_2
};

/// b = y + eps with i.i.d. Gaussian real and imaginary parts of variance
/// |y|_2 * nl_pct. Returns the realized noise norm, not its expectation.
CorruptResult corrupt(const MultiCoilKSpace& y, const NoiseSpec& spec);

struct TissueMasks {
  BoolImage gm;
  BoolImage wm;
};

// Intensity bands of the phantom's piecewise-constant regions.
inline constexpr double kWmBandLo = 0.15;
inline constexpr double kWmBandHi = 0.25;
inline constexpr double kGmBandLo = 0.27;
inline constexpr double kGmBandHi = 0.35;

/// Disjoint grey-/white-matter masks by intensity thresholding of the clean
/// phantom: WM is the broad interior band, GM the distinct higher band.
TissueMasks gm_wm_masks(const ComplexImage& f);

/// splitmix64; used to derive independent sub-seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed);

}  // namespace alma
