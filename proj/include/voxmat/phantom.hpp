#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "voxmat/grid.hpp"
#include "voxmat/trimap.hpp"

namespace voxmat {

namespace detail {

// Counter-based randomness: each draw depends only on (seed, counter), so
// generation is order- and thread-count-independent.
inline std::uint64_t splitmix64(std::uint64_t state) {
  state += 0x9e3779b97f4a7c15ULL;
  state = (state ^ (state >> 30)) * 0xbf58476d1ce4e5b9ULL;
  state = (state ^ (state >> 27)) * 0x94d049bb133111ebULL;
  return state ^ (state >> 31);
}

inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = splitmix64(seed * 0x9e3779b97f4a7c15ULL + counter);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double gaussian(std::uint64_t seed, std::uint64_t counter) {
  // Box-Muller; nudge u1 away from 0 so the log stays finite.
  const double u1 = std::max(uniform01(seed, 2 * counter), 0x1.0p-60);
  const double u2 = uniform01(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

// Synthetic compositing phantom: a radially symmetric soft blob with an
// analytically known alpha matte, the correctness oracle for the solvers
// and the pipeline.
struct PhantomSpec {
  int size = 32;                  // cube edge, >= 16
  std::uint64_t seed = 1;
  double fg_hu_lo = 0.0;          // lesion tissue intensity range
  double fg_hu_hi = 100.0;
  double bg_hu_lo = -950.0;       // lung parenchyma intensity range
  double bg_hu_hi = -850.0;
  double blob_radius_frac = 0.35;     // of the cube edge
  double edge_softness_frac = 0.3;    // transition shell, fraction of radius
  double noise_hu_sigma = 0.0;
  double spacing_mm = 0.5;

  void validate() const {
    if (size < 16) throw InvalidArgument("PhantomSpec: size must be >= 16");
    if (!(blob_radius_frac > 0.0 && blob_radius_frac < 0.5)) {
      throw InvalidArgument("PhantomSpec: blob_radius_frac must be in (0,0.5)");
    }
    if (!(edge_softness_frac > 0.0 && edge_softness_frac <= 1.0)) {
      throw InvalidArgument("PhantomSpec: edge_softness_frac must be in (0,1]");
    }
    if (fg_hu_lo <= bg_hu_hi) {
      throw InvalidArgument("PhantomSpec: fg range must lie above bg range");
    }
    if (noise_hu_sigma < 0.0) {
      throw InvalidArgument("PhantomSpec: noise sigma must be >= 0");
    }
    if (spacing_mm <= 0.0) {
      throw InvalidArgument("PhantomSpec: spacing must be positive");
    }
  }
};

// alpha(r) = 1 inside R*(1-s), 0 outside R, cos^2 falloff between, so the
// alpha gradient is continuous across both shell boundaries.
inline double phantom_alpha_at_radius(const PhantomSpec& spec, double r) {
  const double radius = spec.blob_radius_frac * spec.size;
  const double inner = radius * (1.0 - spec.edge_softness_frac);
  if (r <= inner) return 1.0;
  if (r >= radius) return 0.0;
  const double u = (r - inner) / (radius - inner);
  const double c = std::cos(0.5 * std::numbers::pi * u);
  return c * c;
}

inline AlphaMatte gen_ground_truth_alpha(const PhantomSpec& spec) {
  spec.validate();
  AlphaMatte a = make_alpha({spec.size, spec.size, spec.size},
                            {spec.spacing_mm, spec.spacing_mm, spec.spacing_mm});
  const double c = (spec.size - 1) / 2.0;
  std::int64_t i = 0;
  for (int z = 0; z < spec.size; ++z)
    for (int y = 0; y < spec.size; ++y)
      for (int x = 0; x < spec.size; ++x, ++i) {
        const double r = std::sqrt((x - c) * (x - c) + (y - c) * (y - c) +
                                   (z - c) * (z - c));
        a.values[i] = static_cast<float>(phantom_alpha_at_radius(spec, r));
      }
  return a;
}

// Voxelwise compositing I = alpha*F + (1-alpha)*B plus seeded additive
// Gaussian noise in HU.
inline VolumeGrid composite(const VolumeGrid& fg, const VolumeGrid& bg,
                            const AlphaMatte& alpha, double noise_sigma,
                            std::uint64_t seed) {
  require_nondegenerate(fg, "composite");
  require_same_shape(fg, bg, "composite");
  require_same_shape(fg, alpha, "composite");
  if (noise_sigma < 0.0) {
    throw InvalidArgument("composite: noise sigma must be >= 0");
  }
  VolumeGrid out = fg;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double a = alpha.values[i];
    double v = a * fg.values[i] + (1.0 - a) * bg.values[i];
    if (noise_sigma > 0.0) {
      v += noise_sigma * detail::gaussian(seed, i);
    }
    out.values[i] = static_cast<float>(v);
  }
  return out;
}

// Stand-in for multiple human annotators: mask_j = {alpha >= tau_j} with
// tau_j drawn uniformly from [0.2, 0.8].
inline std::vector<LabelMask> simulate_annotations(const AlphaMatte& gt_alpha,
                                                   int n, std::uint64_t seed) {
  require_nondegenerate(gt_alpha, "simulate_annotations");
  if (n < 2) {
    throw InvalidArgument("simulate_annotations: need n >= 2 annotators");
  }
  std::vector<LabelMask> masks;
  masks.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double tau = 0.2 + 0.6 * detail::uniform01(seed, static_cast<std::uint64_t>(j));
    LabelMask m;
    m.dims = gt_alpha.dims;
    m.spacing = gt_alpha.spacing;
    m.values.resize(gt_alpha.values.size());
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      m.values[i] = gt_alpha.values[i] >= tau ? 1 : 0;
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

struct PhantomSet {
  VolumeGrid image;   // composited HU volume
  VolumeGrid fg;
  VolumeGrid bg;
  AlphaMatte gt_alpha;
  std::vector<LabelMask> masks;
};

// Full phantom: ramped foreground/background textures (x- and y-gradients),
// ground-truth alpha, composited image, and simulated annotator masks.
inline PhantomSet make_phantom(const PhantomSpec& spec, int n_annotators = 4) {
  spec.validate();
  PhantomSet set;
  set.gt_alpha = gen_ground_truth_alpha(spec);
  const std::array<int, 3> dims{spec.size, spec.size, spec.size};
  const std::array<double, 3> sp{spec.spacing_mm, spec.spacing_mm,
                                 spec.spacing_mm};
  set.fg = make_volume(dims, sp, Unit::HU, 0.0f);
  set.bg = make_volume(dims, sp, Unit::HU, 0.0f);
  const double denom = spec.size > 1 ? spec.size - 1.0 : 1.0;
  std::int64_t i = 0;
  for (int z = 0; z < spec.size; ++z)
    for (int y = 0; y < spec.size; ++y)
      for (int x = 0; x < spec.size; ++x, ++i) {
        set.fg.values[i] = static_cast<float>(
            spec.fg_hu_lo + (spec.fg_hu_hi - spec.fg_hu_lo) * (x / denom));
        set.bg.values[i] = static_cast<float>(
            spec.bg_hu_lo + (spec.bg_hu_hi - spec.bg_hu_lo) * (y / denom));
      }
  set.image =
      composite(set.fg, set.bg, set.gt_alpha, spec.noise_hu_sigma, spec.seed);
  set.masks = simulate_annotations(set.gt_alpha, n_annotators, spec.seed);
  return set;
}

}  // namespace voxmat
