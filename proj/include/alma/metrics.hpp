#pragma once

#include "alma/image.hpp"
#include "alma/phantom.hpp"

namespace alma {

struct MetricReport {
  double mssim = 0.0;
  double psnr_db = 0.0;
  double cjv = 0.0;
};

/// Multiscale structural similarity over up to 5 dyadic scales with the
/// standard scale weights, an 11-tap Gaussian window (sigma 1.5) and
/// stability constants (0.01 L)^2, (0.03 L)^2. Per-scale maps are averaged,
/// clamped at 0 and combined by a weighted geometric mean. Images too small
/// for 5 scales use as many scales as fit, with the weights renormalized.
double msssim(const RealImage& img, const RealImage& ref);
double msssim(const RealImage& img, const RealImage& ref, double dynamic_range);

/// 10*log10(peak^2 / MSE) with peak = max(ref); +infinity when img == ref.
double psnr(const RealImage& img, const RealImage& ref);

/// (sigma_GM + sigma_WM) / |mu_GM - mu_WM| over the two masks;
/// +infinity when the means coincide.
double cjv(const RealImage& img, const BoolImage& mask_gm, const BoolImage& mask_wm);

/// All three metrics of a complex reconstruction against the reference
/// phantom: both magnitude images are scaled so the reference peaks at 1.
MetricReport evaluate_metrics(const ComplexImage& x, const ComplexImage& f,
                              const TissueMasks& masks);

}  // namespace alma
