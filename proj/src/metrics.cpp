#include "alma/metrics.hpp"

#include <array>
#include <cmath>

namespace alma {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    double d = i - (kWindow - 1) / 2.0;
    w[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable valid-mode Gaussian filter; output shrinks by kWindow-1 per axis.
RealImage filter_valid(const RealImage& x) {
  static const std::array<double, kWindow> w = gaussian_window();
  const int r = x.rows(), c = x.cols();
  RealImage tmp(r, c - kWindow + 1);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j + kWindow <= c; ++j) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += w[k] * x(i, j + k);
      tmp(i, j) = s;
    }
  RealImage out(r - kWindow + 1, tmp.cols());
  for (int i = 0; i + kWindow <= r; ++i)
    for (int j = 0; j < tmp.cols(); ++j) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += w[k] * tmp(i + k, j);
      out(i, j) = s;
    }
  return out;
}

RealImage downsample2(const RealImage& x) {
  RealImage out(x.rows() / 2, x.cols() / 2);
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j)
      out(i, j) =
          0.25 * (x(2 * i, 2 * j) + x(2 * i + 1, 2 * j) + x(2 * i, 2 * j + 1) + x(2 * i + 1, 2 * j + 1));
  return out;
}

RealImage multiply(const RealImage& a, const RealImage& b) {
  RealImage out(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

double mean_ssim_map(const RealImage& a, const RealImage& b, double c1, double c2) {
  RealImage mu1 = filter_valid(a);
  RealImage mu2 = filter_valid(b);
  RealImage e11 = filter_valid(multiply(a, a));
  RealImage e22 = filter_valid(multiply(b, b));
  RealImage e12 = filter_valid(multiply(a, b));
  double sum = 0.0;
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    double m1 = mu1.data()[i], m2 = mu2.data()[i];
    double s11 = e11.data()[i] - m1 * m1;
    double s22 = e22.data()[i] - m2 * m2;
    double s12 = e12.data()[i] - m1 * m2;
    sum += ((2.0 * m1 * m2 + c1) * (2.0 * s12 + c2)) /
           ((m1 * m1 + m2 * m2 + c1) * (s11 + s22 + c2));
  }
  return sum / static_cast<double>(mu1.size());
}

}  // namespace

double msssim(const RealImage& img, const RealImage& ref, double dynamic_range) {
  if (!img.same_shape(ref)) throw shape_error("msssim: shape mismatch");
  if (!(dynamic_range > 0.0)) throw config_error("msssim: dynamic range must be positive");
  if (std::min(img.rows(), img.cols()) < kWindow)
    throw shape_error("msssim: image smaller than the filter window");

  const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);

  // As many dyadic scales as the image supports, at most 5.
  int n_scales = 1;
  for (int s = std::min(img.rows(), img.cols()) / 2; n_scales < 5 && s >= kWindow; s /= 2)
    ++n_scales;

  double weight_sum = 0.0;
  for (int s = 0; s < n_scales; ++s) weight_sum += kScaleWeights[s];

  RealImage a = img, b = ref;
  double score = 1.0;
  for (int s = 0; s < n_scales; ++s) {
    double v = std::max(mean_ssim_map(a, b, c1, c2), 0.0);
    score *= std::pow(v, kScaleWeights[s] / weight_sum);
    if (s + 1 < n_scales) {
      a = downsample2(a);
      b = downsample2(b);
    }
  }
  return score;
}

double msssim(const RealImage& img, const RealImage& ref) {
  double peak = max_value(ref);
  if (!(peak > 0.0)) throw config_error("msssim: reference image must not be constant zero");
  return msssim(img, ref, peak);
}

double psnr(const RealImage& img, const RealImage& ref) {
  if (!img.same_shape(ref)) throw shape_error("psnr: shape mismatch");
  const double peak = max_value(ref);
  double mse = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    double d = img.data()[i] - ref.data()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(img.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double cjv(const RealImage& img, const BoolImage& mask_gm, const BoolImage& mask_wm) {
  if (img.rows() != mask_gm.rows() || img.cols() != mask_gm.cols() ||
      img.rows() != mask_wm.rows() || img.cols() != mask_wm.cols())
    throw shape_error("cjv: mask shape mismatch");

  auto stats = [&img](const BoolImage& mask) {
    double sum = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < img.size(); ++i)
      if (mask.data()[i]) {
        sum += img.data()[i];
        ++count;
      }
    if (count == 0) throw config_error("cjv: empty mask");
    double mu = sum / count;
    double var = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i)
      if (mask.data()[i]) {
        double d = img.data()[i] - mu;
        var += d * d;
      }
    return std::pair<double, double>(mu, std::sqrt(var / count));
  };

  auto [mu_gm, sd_gm] = stats(mask_gm);
  auto [mu_wm, sd_wm] = stats(mask_wm);
  const double denom = std::abs(mu_gm - mu_wm);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return (sd_gm + sd_wm) / denom;
}

MetricReport evaluate_metrics(const ComplexImage& x, const ComplexImage& f,
                              const TissueMasks& masks) {
  RealImage ref = magnitude(f);
  RealImage img = magnitude(x);
  const double peak = max_value(ref);
  if (!(peak > 0.0)) throw config_error("evaluate_metrics: empty reference");
  for (double& v : ref) v /= peak;
  for (double& v : img) v /= peak;

  MetricReport r;
  r.mssim = msssim(img, ref);
  r.psnr_db = psnr(img, ref);
  r.cjv = cjv(img, masks.gm, masks.wm);
  return r;
}

}  // namespace alma
