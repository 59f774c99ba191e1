#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "voxmat/grid.hpp"
#include "voxmat/sparse.hpp"

namespace voxmat {

struct CfParams {
  int window_k = 3;       // odd window edge length, window volume k^3
  double epsilon = 1e-7;  // variance regularizer

  void validate() const {
    if (window_k < 3 || window_k % 2 == 0) {
      throw InvalidArgument("CfParams: window_k must be odd and >= 3");
    }
    if (epsilon <= 0.0) {
      throw InvalidArgument("CfParams: epsilon must be positive");
    }
  }
};

// Mean and population variance of the k^3 intensities of the window with
// the given origin corner.
inline std::pair<double, double> window_stats(const VolumeGrid& vol,
                                              std::array<int, 3> origin,
                                              int k) {
  for (int a = 0; a < 3; ++a) {
    if (origin[a] < 0 || origin[a] + k > vol.dims[a]) {
      throw InvalidArgument("window_stats: window outside volume");
    }
  }
  const double k3 = static_cast<double>(k) * k * k;
  double sum = 0.0;
  for (int dz = 0; dz < k; ++dz)
    for (int dy = 0; dy < k; ++dy)
      for (int dx = 0; dx < k; ++dx)
        sum += vol.at(origin[0] + dx, origin[1] + dy, origin[2] + dz);
  const double mu = sum / k3;
  double ss = 0.0;
  for (int dz = 0; dz < k; ++dz)
    for (int dy = 0; dy < k; ++dy)
      for (int dx = 0; dx < k; ++dx) {
        const double d =
            vol.at(origin[0] + dx, origin[1] + dy, origin[2] + dz) - mu;
        ss += d * d;
      }
  return {mu, ss / k3};
}

namespace detail {

// Origin range of complete windows containing voxel coordinate v.
inline std::pair<int, int> window_origin_range(int v, int dim, int k) {
  return {std::max(0, v - k + 1), std::min(dim - k, v)};
}

// Two voxels share a complete window iff their per-axis origin ranges
// intersect.
inline bool share_window(const std::array<int, 3>& a,
                         const std::array<int, 3>& b,
                         const std::array<int, 3>& dims, int k) {
  for (int axis = 0; axis < 3; ++axis) {
    const auto [alo, ahi] = window_origin_range(a[axis], dims[axis], k);
    const auto [blo, bhi] = window_origin_range(b[axis], dims[axis], k);
    if (std::max(alo, blo) > std::min(ahi, bhi)) return false;
  }
  return true;
}

}  // namespace detail

// Matting Laplacian over all complete k x k x k windows of a normalized
// grayscale volume. Per window with mean mu and population variance s2,
// the (i,j) contribution is
//   delta_ij - (1/k^3) * ((I_i - mu)(I_j - mu) / (s2 + eps/k^3) + 1)
// accumulated over every window containing both voxels. Each window term
// is PSD and annihilates constants, so L has zero row sums and is PSD.
inline SparseSymMatrix build_cf_laplacian(const VolumeGrid& vol,
                                          const CfParams& params) {
  require_nondegenerate(vol, "build_cf_laplacian");
  params.validate();
  if (vol.unit != Unit::Normalized) {
    throw InvalidArgument("build_cf_laplacian: volume must be normalized");
  }
  const int k = params.window_k;
  for (int a = 0; a < 3; ++a) {
    if (vol.dims[a] < k) {
      throw InvalidArgument("build_cf_laplacian: volume smaller than window");
    }
  }

  const int nx = vol.dims[0], ny = vol.dims[1], nz = vol.dims[2];
  const std::int64_t n = vol.size();
  const int reach = k - 1;

  // Pattern: (p,q) is structurally nonzero iff p and q share a complete
  // window. Iterating offsets (dz,dy,dx) ascending yields sorted columns.
  std::vector<std::int64_t> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::int32_t> cols;
  {
    std::int64_t count = 0;
    std::int64_t p = 0;
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x, ++p) {
          row_ptr[p] = count;
          for (int dz = -reach; dz <= reach; ++dz) {
            const int qz = z + dz;
            if (qz < 0 || qz >= nz) continue;
            for (int dy = -reach; dy <= reach; ++dy) {
              const int qy = y + dy;
              if (qy < 0 || qy >= ny) continue;
              for (int dx = -reach; dx <= reach; ++dx) {
                const int qx = x + dx;
                if (qx < 0 || qx >= nx) continue;
                if (detail::share_window({x, y, z}, {qx, qy, qz}, vol.dims, k))
                  ++count;
              }
            }
          }
        }
    row_ptr[n] = count;
    cols.resize(static_cast<std::size_t>(count));
    p = 0;
    std::int64_t w = 0;
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x, ++p) {
          for (int dz = -reach; dz <= reach; ++dz) {
            const int qz = z + dz;
            if (qz < 0 || qz >= nz) continue;
            for (int dy = -reach; dy <= reach; ++dy) {
              const int qy = y + dy;
              if (qy < 0 || qy >= ny) continue;
              for (int dx = -reach; dx <= reach; ++dx) {
                const int qx = x + dx;
                if (qx < 0 || qx >= nx) continue;
                if (detail::share_window({x, y, z}, {qx, qy, qz}, vol.dims, k))
                  cols[w++] = static_cast<std::int32_t>(
                      vol.index(qx, qy, qz));
              }
            }
          }
        }
  }
  std::vector<double> vals(cols.size(), 0.0);

  // Accumulation. Windows iterate x-fastest; member pairs in fixed order,
  // so serial assembly is bitwise reproducible.
  const int k3 = k * k * k;
  const double inv_k3 = 1.0 / k3;
  std::vector<std::int64_t> gidx(static_cast<std::size_t>(k3));
  std::vector<double> dev(static_cast<std::size_t>(k3));
  for (int oz = 0; oz + k <= nz; ++oz)
    for (int oy = 0; oy + k <= ny; ++oy)
      for (int ox = 0; ox + k <= nx; ++ox) {
        double sum = 0.0;
        int m = 0;
        for (int dz = 0; dz < k; ++dz)
          for (int dy = 0; dy < k; ++dy)
            for (int dx = 0; dx < k; ++dx, ++m) {
              gidx[m] = vol.index(ox + dx, oy + dy, oz + dz);
              dev[m] = vol.values[gidx[m]];
              sum += dev[m];
            }
        const double mu = sum * inv_k3;
        double ss = 0.0;
        for (int i = 0; i < k3; ++i) {
          dev[i] -= mu;
          ss += dev[i] * dev[i];
        }
        const double sigma2 = ss * inv_k3;
        const double inv_var = 1.0 / (sigma2 + params.epsilon * inv_k3);

        for (int a = 0; a < k3; ++a) {
          const std::int64_t row = gidx[a];
          const std::int64_t begin = row_ptr[row];
          const std::int64_t end = row_ptr[row + 1];
          std::int64_t pos = begin;
          for (int b = 0; b < k3; ++b) {
            // gidx is ascending in b, so walk the sorted row forward.
            const auto target = static_cast<std::int32_t>(gidx[b]);
            while (pos < end && cols[pos] < target) ++pos;
            const double contrib = (a == b ? 1.0 : 0.0) -
                                   inv_k3 * (inv_var * dev[a] * dev[b] + 1.0);
            vals[pos] += contrib;
          }
        }
      }

  return SparseSymMatrix(n, std::move(row_ptr), std::move(cols),
                         std::move(vals));
}

}  // namespace voxmat
