#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace voxmat {

// 26-connectivity helpers over flat x-fastest grids. The in_set predicate
// is a byte mask of the same length as the grid.

namespace detail {

inline std::vector<std::array<int, 3>> neighbors26() {
  std::vector<std::array<int, 3>> offs;
  offs.reserve(26);
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx || dy || dz) offs.push_back({dx, dy, dz});
  return offs;
}

}  // namespace detail

// Labels each 26-connected component of in_set with ids 0..count-1 in scan
// order of their first voxel; voxels outside the set get -1.
inline std::vector<std::int32_t> label_components_26(
    const std::array<int, 3>& dims, const std::vector<std::uint8_t>& in_set,
    int* component_count = nullptr) {
  const std::int64_t n =
      static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n), -1);
  const auto offs = detail::neighbors26();
  std::vector<std::int64_t> stack;
  int next = 0;
  for (std::int64_t start = 0; start < n; ++start) {
    if (!in_set[start] || labels[start] >= 0) continue;
    labels[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::int64_t cur = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(cur % dims[0]);
      const int y = static_cast<int>((cur / dims[0]) % dims[1]);
      const int z = static_cast<int>(cur / (static_cast<std::int64_t>(dims[0]) * dims[1]));
      for (const auto& d : offs) {
        const int qx = x + d[0], qy = y + d[1], qz = z + d[2];
        if (qx < 0 || qx >= dims[0] || qy < 0 || qy >= dims[1] || qz < 0 ||
            qz >= dims[2])
          continue;
        const std::int64_t q =
            qx + static_cast<std::int64_t>(dims[0]) * (qy + static_cast<std::int64_t>(dims[1]) * qz);
        if (in_set[q] && labels[q] < 0) {
          labels[q] = next;
          stack.push_back(q);
        }
      }
    }
    ++next;
  }
  if (component_count) *component_count = next;
  return labels;
}

// Voxels of in_set 26-reachable from any seed voxel (seeds outside the set
// are ignored).
inline std::vector<std::uint8_t> reachable_26(
    const std::array<int, 3>& dims, const std::vector<std::uint8_t>& in_set,
    const std::vector<std::uint8_t>& seeds) {
  const std::int64_t n =
      static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(n), 0);
  const auto offs = detail::neighbors26();
  std::vector<std::int64_t> stack;
  for (std::int64_t i = 0; i < n; ++i) {
    if (seeds[i] && in_set[i] && !visited[i]) {
      visited[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::int64_t cur = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(cur % dims[0]);
    const int y = static_cast<int>((cur / dims[0]) % dims[1]);
    const int z = static_cast<int>(cur / (static_cast<std::int64_t>(dims[0]) * dims[1]));
    for (const auto& d : offs) {
      const int qx = x + d[0], qy = y + d[1], qz = z + d[2];
      if (qx < 0 || qx >= dims[0] || qy < 0 || qy >= dims[1] || qz < 0 ||
          qz >= dims[2])
        continue;
      const std::int64_t q =
          qx + static_cast<std::int64_t>(dims[0]) * (qy + static_cast<std::int64_t>(dims[1]) * qz);
      if (in_set[q] && !visited[q]) {
        visited[q] = 1;
        stack.push_back(q);
      }
    }
  }
  return visited;
}

}  // namespace voxmat
