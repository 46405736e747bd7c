#include "alma/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>

namespace alma {
namespace {

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan (Toft) parameters; additive region values.
constexpr Ellipse kPhantom[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

}  // namespace

ComplexImage shepp_logan(int n) {
  if (n < 32) throw config_error("shepp_logan: n must be at least 32");
  ComplexImage f(n, n, cplx(0.0, 0.0));
  const double half = (n - 1) / 2.0;
  for (const Ellipse& e : kPhantom) {
    const double phi = e.phi_deg * std::numbers::pi / 180.0;
    const double c = std::cos(phi), s = std::sin(phi);
    for (int i = 0; i < n; ++i) {
      const double y = (half - i) / half;  // row 0 is the top of the image
      for (int j = 0; j < n; ++j) {
        const double x = (j - half) / half;
        const double xr = c * (x - e.x0) + s * (y - e.y0);
        const double yr = -s * (x - e.x0) + c * (y - e.y0);
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0)
          f(i, j) += e.value;
      }
    }
  }
  // The signed contributions cancel to tiny negatives inside the ventricles.
  for (cplx& v : f) v = cplx(std::max(v.real(), 0.0), 0.0);
  return f;
}

CoilSensitivities simulate_coils(int n, int n_coils) {
  if (n_coils < 1) throw config_error("simulate_coils: need at least one coil");
  CoilSensitivities C;
  C.maps.reserve(n_coils);
  const double cx = n / 2.0, cy = n / 2.0;
  const double radius = 0.55 * n;
  const double width = 0.45 * n;
  for (int k = 0; k < n_coils; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n_coils;
    const double lx = cx + radius * std::cos(angle);
    const double ly = cy + radius * std::sin(angle);
    // Gentle linear phase along the coil direction plus a per-coil offset.
    const double px = 0.3 * 2.0 * std::numbers::pi * std::cos(angle) / n;
    const double py = 0.3 * 2.0 * std::numbers::pi * std::sin(angle) / n;
    ComplexImage map(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double dx = j - lx, dy = i - ly;
        const double mag = std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        const double phase = px * (j - cx) + py * (i - cy) + angle;
        map(i, j) = mag * cplx(std::cos(phase), std::sin(phase));
      }
    }
    C.maps.push_back(std::move(map));
  }
  return C;
}

SamplingMask draw_trajectory(const TrajectorySpec& spec) {
  if (spec.n_lines <= 0 || spec.ur_pct <= 0.0 || spec.ur_pct > 1.0)
    throw std::domain_error("draw_trajectory: invalid spec");
  const int total = static_cast<int>(std::ceil(spec.n_lines * spec.ur_pct));
  if (total > spec.n_lines) throw std::domain_error("draw_trajectory: more lines than available");

  const int center = spec.n_lines / 2;  // DC line of the centered grid
  const int n_center = std::min(total, static_cast<int>(std::ceil(total * spec.center_frac)));

  std::vector<bool> taken(spec.n_lines, false);
  std::vector<int> lines;
  lines.reserve(total);
  const int start = center - n_center / 2;
  for (int k = 0; k < n_center; ++k) {
    int line = std::clamp(start + k, 0, spec.n_lines - 1);
    if (!taken[line]) {
      taken[line] = true;
      lines.push_back(line);
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(static_cast<double>(center),
                                         std::sqrt(spec.n_lines * spec.ur_pct));
  // Rejection sampling without replacement; a generous draw budget guards the
  // degenerate high-rate case where the tail mass cannot supply enough
  // distinct lines, after which the nearest free lines complete the set.
  long budget = 200000L + 20000L * total;
  while (static_cast<int>(lines.size()) < total && budget-- > 0) {
    int line = static_cast<int>(std::lround(gauss(rng)));
    if (line < 0 || line >= spec.n_lines || taken[line]) continue;
    taken[line] = true;
    lines.push_back(line);
  }
  for (int d = 1; static_cast<int>(lines.size()) < total && d < spec.n_lines; ++d) {
    for (int line : {center - d, center + d}) {
      if (static_cast<int>(lines.size()) == total) break;
      if (line >= 0 && line < spec.n_lines && !taken[line]) {
        taken[line] = true;
        lines.push_back(line);
      }
    }
  }

  SamplingMask mask;
  mask.n_lines = spec.n_lines;
  mask.acquired = std::move(lines);
  std::sort(mask.acquired.begin(), mask.acquired.end());
  mask.validate();
  return mask;
}

MultiCoilKSpace simulate_acquisition(const ComplexImage& f, const CoilSensitivities& C,
                                     const SamplingMask& U) {
  return forward(f, C, U);
}

CorruptResult corrupt(const MultiCoilKSpace& y, const NoiseSpec& spec) {
  if (spec.nl_pct < 0.0) throw std::domain_error("corrupt: noise level must be nonnegative");
  CorruptResult out;
  out.b = y;
  if (spec.nl_pct == 0.0) return out;

  const double sigma = std::sqrt(norm2(y) * spec.nl_pct);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  double eps_sq = 0.0;
  for (cplx& v : out.b.data) {
    const double er = gauss(rng), ei = gauss(rng);
    v += cplx(er, ei);
    eps_sq += er * er + ei * ei;
  }
  out.eta = std::sqrt(eps_sq);
  return out;
}

TissueMasks gm_wm_masks(const ComplexImage& f) {
  TissueMasks m;
  m.gm = BoolImage(f.rows(), f.cols(), 0);
  m.wm = BoolImage(f.rows(), f.cols(), 0);
  int n_gm = 0, n_wm = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = std::abs(f.data()[i]);
    if (v >= kGmBandLo && v <= kGmBandHi) {
      m.gm.data()[i] = 1;
      ++n_gm;
    } else if (v >= kWmBandLo && v <= kWmBandHi) {
      m.wm.data()[i] = 1;
      ++n_wm;
    }
  }
  if (n_gm == 0 || n_wm == 0)
    throw config_error("gm_wm_masks: empty mask; intensity bands do not match this image");
  return m;
}

std::uint64_t mix_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace alma
