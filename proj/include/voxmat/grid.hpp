#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "voxmat/errors.hpp"

namespace voxmat {

enum class Unit { HU, Normalized };

// Dense 3D scalar field. Values are stored flat in x-fastest order:
// index i = x + nx*(y + ny*z).
template <typename T>
struct Grid3 {
  using value_type = T;

  std::array<int, 3> dims{0, 0, 0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::vector<T> values;

  [[nodiscard]] std::int64_t size() const {
    return static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
  }

  [[nodiscard]] std::int64_t index(int x, int y, int z) const {
    return x + static_cast<std::int64_t>(dims[0]) *
                   (y + static_cast<std::int64_t>(dims[1]) * z);
  }

  [[nodiscard]] T& at(int x, int y, int z) { return values[index(x, y, z)]; }
  [[nodiscard]] const T& at(int x, int y, int z) const {
    return values[index(x, y, z)];
  }

  [[nodiscard]] bool in_bounds(int x, int y, int z) const {
    return x >= 0 && x < dims[0] && y >= 0 && y < dims[1] && z >= 0 &&
           z < dims[2];
  }
};

struct VolumeGrid : Grid3<float> {
  Unit unit = Unit::HU;
};

// Per-voxel opacity in [0,1]; dims match the volume it was solved from.
struct AlphaMatte : Grid3<float> {};

// Binary annotation mask, values in {0,1}.
struct LabelMask : Grid3<std::uint8_t> {};

// Numeric order matches increasing certainty of foreground.
enum class TrimapLabel : std::uint8_t { Background = 0, Unknown = 1, Foreground = 2 };

struct Trimap : Grid3<std::uint8_t> {};

[[nodiscard]] inline VolumeGrid make_volume(std::array<int, 3> dims,
                                            std::array<double, 3> spacing,
                                            Unit unit, float fill = 0.0f) {
  VolumeGrid v;
  v.dims = dims;
  v.spacing = spacing;
  v.unit = unit;
  v.values.assign(static_cast<std::size_t>(v.size()), fill);
  return v;
}

[[nodiscard]] inline AlphaMatte make_alpha(std::array<int, 3> dims,
                                           std::array<double, 3> spacing,
                                           float fill = 0.0f) {
  AlphaMatte a;
  a.dims = dims;
  a.spacing = spacing;
  a.values.assign(static_cast<std::size_t>(a.size()), fill);
  return a;
}

[[nodiscard]] inline LabelMask make_mask(std::array<int, 3> dims,
                                         std::array<double, 3> spacing,
                                         std::uint8_t fill = 0) {
  LabelMask m;
  m.dims = dims;
  m.spacing = spacing;
  m.values.assign(static_cast<std::size_t>(m.size()), fill);
  return m;
}

[[nodiscard]] inline Trimap make_trimap(std::array<int, 3> dims,
                                        std::array<double, 3> spacing,
                                        TrimapLabel fill = TrimapLabel::Unknown) {
  Trimap t;
  t.dims = dims;
  t.spacing = spacing;
  t.values.assign(static_cast<std::size_t>(t.size()),
                  static_cast<std::uint8_t>(fill));
  return t;
}

template <typename GridA, typename GridB>
[[nodiscard]] inline bool same_shape(const GridA& a, const GridB& b) {
  return a.dims == b.dims;
}

template <typename GridA, typename GridB>
inline void require_same_shape(const GridA& a, const GridB& b,
                               const char* what) {
  if (!same_shape(a, b)) {
    throw ShapeMismatch(std::string(what) + ": grid dims differ");
  }
}

template <typename Grid>
inline void require_nondegenerate(const Grid& g, const char* what) {
  if (g.dims[0] <= 0 || g.dims[1] <= 0 || g.dims[2] <= 0) {
    throw InvalidArgument(std::string(what) + ": degenerate volume dims");
  }
  if (g.spacing[0] <= 0.0 || g.spacing[1] <= 0.0 || g.spacing[2] <= 0.0) {
    throw InvalidArgument(std::string(what) + ": spacing must be positive");
  }
  if (static_cast<std::int64_t>(g.values.size()) != g.size()) {
    throw InvalidArgument(std::string(what) +
                          ": values length does not match dims");
  }
}

}  // namespace voxmat
