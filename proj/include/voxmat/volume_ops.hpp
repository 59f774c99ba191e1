#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "voxmat/grid.hpp"

namespace voxmat {

namespace detail {

// Continuous input index for the center of output voxel i: voxel centers sit
// at (i + 0.5) * spacing in physical space.
inline double center_to_input_index(int i, double out_spacing,
                                    double in_spacing) {
  return (static_cast<double>(i) + 0.5) * out_spacing / in_spacing - 0.5;
}

template <typename T>
inline double trilinear_sample(const Grid3<T>& g, double u, double v,
                               double w) {
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const int z0 = static_cast<int>(std::floor(w));
  const double fx = u - x0;
  const double fy = v - y0;
  const double fz = w - z0;

  const auto cl = [](int i, int n) { return std::clamp(i, 0, n - 1); };
  const int xa = cl(x0, g.dims[0]), xb = cl(x0 + 1, g.dims[0]);
  const int ya = cl(y0, g.dims[1]), yb = cl(y0 + 1, g.dims[1]);
  const int za = cl(z0, g.dims[2]), zb = cl(z0 + 1, g.dims[2]);

  const double c000 = g.at(xa, ya, za), c100 = g.at(xb, ya, za);
  const double c010 = g.at(xa, yb, za), c110 = g.at(xb, yb, za);
  const double c001 = g.at(xa, ya, zb), c101 = g.at(xb, ya, zb);
  const double c011 = g.at(xa, yb, zb), c111 = g.at(xb, yb, zb);

  const double c00 = c000 * (1.0 - fx) + c100 * fx;
  const double c10 = c010 * (1.0 - fx) + c110 * fx;
  const double c01 = c001 * (1.0 - fx) + c101 * fx;
  const double c11 = c011 * (1.0 - fx) + c111 * fx;
  const double c0 = c00 * (1.0 - fy) + c10 * fy;
  const double c1 = c01 * (1.0 - fy) + c11 * fy;
  return c0 * (1.0 - fz) + c1 * fz;
}

inline std::array<int, 3> isotropic_dims(const std::array<int, 3>& dims,
                                         const std::array<double, 3>& spacing,
                                         double target) {
  std::array<int, 3> out{};
  for (int k = 0; k < 3; ++k) {
    out[k] = std::max<int>(
        1, static_cast<int>(std::llround(dims[k] * spacing[k] / target)));
  }
  return out;
}

}  // namespace detail

// Trilinear resample onto an isotropic grid of the given spacing.
// Out-of-bounds samples clamp to the nearest edge voxel.
inline VolumeGrid resample_to_isotropic(const VolumeGrid& vol,
                                        double target_spacing_mm) {
  require_nondegenerate(vol, "resample_to_isotropic");
  if (target_spacing_mm <= 0.0) {
    throw InvalidArgument("resample_to_isotropic: target spacing must be > 0");
  }
  VolumeGrid out =
      make_volume(detail::isotropic_dims(vol.dims, vol.spacing, target_spacing_mm),
                  {target_spacing_mm, target_spacing_mm, target_spacing_mm},
                  vol.unit, 0.0f);
  std::int64_t i = 0;
  for (int z = 0; z < out.dims[2]; ++z) {
    const double w = detail::center_to_input_index(z, target_spacing_mm,
                                                   vol.spacing[2]);
    for (int y = 0; y < out.dims[1]; ++y) {
      const double v = detail::center_to_input_index(y, target_spacing_mm,
                                                     vol.spacing[1]);
      for (int x = 0; x < out.dims[0]; ++x) {
        const double u = detail::center_to_input_index(x, target_spacing_mm,
                                                       vol.spacing[0]);
        out.values[i++] =
            static_cast<float>(detail::trilinear_sample(vol, u, v, w));
      }
    }
  }
  return out;
}

// Nearest-neighbor resample; label fields must stay binary.
inline LabelMask resample_mask_to_isotropic(const LabelMask& mask,
                                            double target_spacing_mm) {
  require_nondegenerate(mask, "resample_mask_to_isotropic");
  if (target_spacing_mm <= 0.0) {
    throw InvalidArgument(
        "resample_mask_to_isotropic: target spacing must be > 0");
  }
  LabelMask out;
  out.dims = detail::isotropic_dims(mask.dims, mask.spacing, target_spacing_mm);
  out.spacing = {target_spacing_mm, target_spacing_mm, target_spacing_mm};
  out.values.resize(static_cast<std::size_t>(out.size()));
  const auto nearest = [&](int i, int axis) {
    const double u = detail::center_to_input_index(i, target_spacing_mm,
                                                   mask.spacing[axis]);
    return std::clamp(static_cast<int>(std::llround(u)), 0, mask.dims[axis] - 1);
  };
  std::int64_t i = 0;
  for (int z = 0; z < out.dims[2]; ++z) {
    const int sz = nearest(z, 2);
    for (int y = 0; y < out.dims[1]; ++y) {
      const int sy = nearest(y, 1);
      for (int x = 0; x < out.dims[0]; ++x) {
        out.values[i++] = mask.at(nearest(x, 0), sy, sz);
      }
    }
  }
  return out;
}

// Transverse crop of xy_size x xy_size centered on (cx, cy), z-range
// [z_lo, z_hi] extended by z_pad slices at both ends. Regions outside the
// source are filled with fill_value. Spacing is preserved.
template <typename GridT>
[[nodiscard]] inline GridT crop_centered(const GridT& g, int cx, int cy,
                                         int xy_size, int z_lo, int z_hi,
                                         int z_pad,
                                         typename GridT::value_type fill_value) {
  require_nondegenerate(g, "crop_centered");
  if (xy_size <= 0) {
    throw InvalidArgument("crop_centered: xy_size must be positive");
  }
  if (z_pad < 0) {
    throw InvalidArgument("crop_centered: z_pad must be non-negative");
  }
  if (cx < 0 || cx >= g.dims[0] || cy < 0 || cy >= g.dims[1]) {
    throw InvalidArgument("crop_centered: center voxel outside volume");
  }
  if (z_lo > z_hi || z_lo < 0 || z_hi >= g.dims[2]) {
    throw InvalidArgument("crop_centered: z-range outside volume");
  }
  GridT out;
  out.dims = {xy_size, xy_size, z_hi - z_lo + 1 + 2 * z_pad};
  out.spacing = g.spacing;
  if constexpr (requires { out.unit; }) {
    out.unit = g.unit;
  }
  out.values.assign(static_cast<std::size_t>(out.size()), fill_value);

  const int x0 = cx - xy_size / 2;
  const int y0 = cy - xy_size / 2;
  const int z0 = z_lo - z_pad;
  for (int z = 0; z < out.dims[2]; ++z) {
    const int sz = z0 + z;
    if (sz < 0 || sz >= g.dims[2]) continue;
    for (int y = 0; y < out.dims[1]; ++y) {
      const int sy = y0 + y;
      if (sy < 0 || sy >= g.dims[1]) continue;
      for (int x = 0; x < out.dims[0]; ++x) {
        const int sx = x0 + x;
        if (sx < 0 || sx >= g.dims[0]) continue;
        out.at(x, y, z) = g.at(sx, sy, sz);
      }
    }
  }
  return out;
}

// Maps [w_min, w_max] HU linearly onto [0,1], clamping outside.
inline VolumeGrid clamp_window(const VolumeGrid& vol, double w_min,
                               double w_max) {
  require_nondegenerate(vol, "clamp_window");
  if (w_min >= w_max) {
    throw InvalidArgument("clamp_window: w_min must be < w_max");
  }
  VolumeGrid out = vol;
  out.unit = Unit::Normalized;
  const double inv = 1.0 / (w_max - w_min);
  for (auto& v : out.values) {
    v = static_cast<float>(
        std::clamp((static_cast<double>(v) - w_min) * inv, 0.0, 1.0));
  }
  return out;
}

}  // namespace voxmat
