#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "voxmat/grid.hpp"

namespace voxmat {

// The (S, D, lambda) triple of the constrained matting objective:
// s_values holds the per-voxel targets (meaningful where constrained),
// constrained marks the diagonal of D, lambda is the penalty weight.
struct SoftConstraint {
  std::vector<double> s_values;
  std::vector<std::uint8_t> constrained;
  double lambda = 100.0;

  [[nodiscard]] std::int64_t constrained_count() const {
    std::int64_t c = 0;
    for (auto b : constrained) c += b;
    return c;
  }
};

// HU-to-alpha calibration for foreground constraints. Between w_min and
// w_max the mapping ramps linearly; at or above l_low it is 1. l_high and
// the mapping above it are kept for completeness but default to the
// simplified setting (l_low at the window top, constant 1 above).
struct HuCalibration {
  double w_min = -1350.0;
  double w_max = 150.0;
  double l_low = 150.0;
  double l_high = std::numeric_limits<double>::infinity();

  [[nodiscard]] static HuCalibration from_window(double w_min, double w_max) {
    if (w_min >= w_max) {
      throw InvalidArgument("HuCalibration: w_min must be < w_max");
    }
    return HuCalibration{w_min, w_max, w_max,
                         std::numeric_limits<double>::infinity()};
  }

  [[nodiscard]] double foreground_alpha(double hu) const {
    if (hu >= l_low) return 1.0;  // covers the (l_low, l_high) and p branches
    const double a = (hu - w_min) / (w_max - w_min);
    return a < 0.0 ? 0.0 : (a > 1.0 ? 1.0 : a);
  }
};

struct FusedMasks {
  LabelMask overlap;
  LabelMask union_mask;
};

// Voxelwise AND / OR over two or more annotator masks.
inline FusedMasks fuse_masks(const std::vector<LabelMask>& masks) {
  if (masks.size() < 2) {
    throw InvalidArgument("fuse_masks: need at least 2 masks");
  }
  for (const auto& m : masks) {
    require_nondegenerate(m, "fuse_masks");
    require_same_shape(masks.front(), m, "fuse_masks");
    if (m.spacing != masks.front().spacing) {
      throw ShapeMismatch("fuse_masks: spacing differs between masks");
    }
  }
  FusedMasks out{masks.front(), masks.front()};
  const std::size_t n = masks.front().values.size();
  for (std::size_t j = 1; j < masks.size(); ++j) {
    const auto& v = masks[j].values;
    for (std::size_t i = 0; i < n; ++i) {
      out.overlap.values[i] = out.overlap.values[i] & v[i];
      out.union_mask.values[i] = out.union_mask.values[i] | v[i];
    }
  }
  return out;
}

namespace detail {

// Offsets of a discrete Euclidean ball of the given voxel radius.
inline std::vector<std::array<int, 3>> ball_offsets(int radius) {
  std::vector<std::array<int, 3>> offs;
  const int r2 = radius * radius;
  for (int dz = -radius; dz <= radius; ++dz)
    for (int dy = -radius; dy <= radius; ++dy)
      for (int dx = -radius; dx <= radius; ++dx)
        if (dx * dx + dy * dy + dz * dz <= r2) offs.push_back({dx, dy, dz});
  return offs;
}

}  // namespace detail

// FG where all annotators agree, BG outside every annotation, UNK between;
// the UNK band is then dilated by a Euclidean ball, converting only FG/BG
// voxels. The three labels always partition the volume.
inline Trimap build_trimap(const LabelMask& overlap, const LabelMask& union_mask,
                           int dilate_radius_vox) {
  require_nondegenerate(overlap, "build_trimap");
  require_same_shape(overlap, union_mask, "build_trimap");
  if (dilate_radius_vox < 0) {
    throw InvalidArgument("build_trimap: dilate radius must be >= 0");
  }
  const std::size_t n = overlap.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (overlap.values[i] && !union_mask.values[i]) {
      throw InconsistentMasks(
          "build_trimap: overlap not contained in union at voxel " +
          std::to_string(i));
    }
  }

  Trimap t;
  t.dims = overlap.dims;
  t.spacing = overlap.spacing;
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.values[i] = overlap.values[i]
                      ? static_cast<std::uint8_t>(TrimapLabel::Foreground)
                      : (union_mask.values[i]
                             ? static_cast<std::uint8_t>(TrimapLabel::Unknown)
                             : static_cast<std::uint8_t>(TrimapLabel::Background));
  }
  if (dilate_radius_vox == 0) return t;

  const auto offs = detail::ball_offsets(dilate_radius_vox);
  Trimap dilated = t;
  for (int z = 0; z < t.dims[2]; ++z)
    for (int y = 0; y < t.dims[1]; ++y)
      for (int x = 0; x < t.dims[0]; ++x) {
        if (t.at(x, y, z) != static_cast<std::uint8_t>(TrimapLabel::Unknown))
          continue;
        for (const auto& d : offs) {
          const int nx = x + d[0], ny = y + d[1], nz = z + d[2];
          if (t.in_bounds(nx, ny, nz)) {
            dilated.at(nx, ny, nz) =
                static_cast<std::uint8_t>(TrimapLabel::Unknown);
          }
        }
      }
  return dilated;
}

// Hard constraints: 1 on FG, 0 on BG, free on UNK.
inline SoftConstraint binary_constraints(const Trimap& trimap, double lambda) {
  require_nondegenerate(trimap, "binary_constraints");
  if (lambda <= 0.0) {
    throw InvalidArgument("binary_constraints: lambda must be positive");
  }
  SoftConstraint c;
  c.lambda = lambda;
  const std::size_t n = trimap.values.size();
  c.s_values.assign(n, 0.0);
  c.constrained.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<TrimapLabel>(trimap.values[i]);
    if (label == TrimapLabel::Foreground) {
      c.s_values[i] = 1.0;
      c.constrained[i] = 1;
    } else if (label == TrimapLabel::Background) {
      c.constrained[i] = 1;
    }
  }
  return c;
}

// Calibrated constraints: BG stays 0, FG targets follow the HU ramp, so the
// matte keeps internal lesion structure. Reduces to binary_constraints when
// every FG voxel sits at or above the window top.
inline SoftConstraint hu_calibrated_constraints(const VolumeGrid& vol,
                                                const Trimap& trimap,
                                                const HuCalibration& calib,
                                                double lambda) {
  require_nondegenerate(vol, "hu_calibrated_constraints");
  require_same_shape(vol, trimap, "hu_calibrated_constraints");
  if (vol.unit != Unit::HU) {
    throw InvalidArgument("hu_calibrated_constraints: volume must be in HU");
  }
  if (calib.w_min >= calib.w_max) {
    throw InvalidArgument("hu_calibrated_constraints: w_min must be < w_max");
  }
  if (lambda <= 0.0) {
    throw InvalidArgument("hu_calibrated_constraints: lambda must be positive");
  }
  SoftConstraint c;
  c.lambda = lambda;
  const std::size_t n = trimap.values.size();
  c.s_values.assign(n, 0.0);
  c.constrained.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<TrimapLabel>(trimap.values[i]);
    if (label == TrimapLabel::Foreground) {
      c.s_values[i] = calib.foreground_alpha(vol.values[i]);
      c.constrained[i] = 1;
    } else if (label == TrimapLabel::Background) {
      c.constrained[i] = 1;
    }
  }
  return c;
}

}  // namespace voxmat
