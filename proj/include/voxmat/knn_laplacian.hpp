#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "voxmat/grid.hpp"
#include "voxmat/sparse.hpp"

namespace voxmat {

struct KnnParams {
  int k_neighbors = 10;
  double spatial_weight = 1.0;  // scales normalized voxel coordinates

  void validate() const {
    if (k_neighbors < 1) {
      throw InvalidArgument("KnnParams: k_neighbors must be >= 1");
    }
    if (spatial_weight < 0.0) {
      throw InvalidArgument("KnnParams: spatial_weight must be >= 0");
    }
  }
};

// Row-major N x 4 feature matrix: (intensity, s*x/nx, s*y/ny, s*z/nz).
struct FeatureArray {
  static constexpr int kDim = 4;
  std::int64_t n = 0;
  std::vector<double> data;

  [[nodiscard]] const double* row(std::int64_t i) const {
    return data.data() + kDim * i;
  }
};

inline FeatureArray build_features(const VolumeGrid& vol,
                                   double spatial_weight) {
  require_nondegenerate(vol, "build_features");
  if (vol.unit != Unit::Normalized) {
    throw InvalidArgument("build_features: volume must be normalized");
  }
  if (spatial_weight < 0.0) {
    throw InvalidArgument("build_features: spatial_weight must be >= 0");
  }
  FeatureArray f;
  f.n = vol.size();
  f.data.resize(static_cast<std::size_t>(f.n) * FeatureArray::kDim);
  const double sx = spatial_weight / vol.dims[0];
  const double sy = spatial_weight / vol.dims[1];
  const double sz = spatial_weight / vol.dims[2];
  std::int64_t i = 0;
  for (int z = 0; z < vol.dims[2]; ++z)
    for (int y = 0; y < vol.dims[1]; ++y)
      for (int x = 0; x < vol.dims[0]; ++x, ++i) {
        double* r = f.data.data() + FeatureArray::kDim * i;
        r[0] = vol.values[i];
        r[1] = sx * x;
        r[2] = sy * y;
        r[3] = sz * z;
      }
  return f;
}

namespace detail {

inline double l1_distance(const double* a, const double* b) {
  return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) +
         std::abs(a[2] - b[2]) + std::abs(a[3] - b[3]);
}

}  // namespace detail

// Exact k-nearest-neighbor lists under L1 feature distance, ties broken by
// smaller linear index. Row i holds the k neighbors of voxel i in order of
// increasing (distance, index). Queries run in parallel; each voxel's result
// is independent of thread count. The seed parameter is reserved for
// approximate backends and is unused by the exact search.
inline std::vector<std::int32_t> knn_graph(const FeatureArray& features, int k,
                                           std::uint64_t seed = 0) {
  (void)seed;
  const std::int64_t n = features.n;
  if (k < 1 || k >= n) {
    throw InvalidArgument("knn_graph: need 1 <= k < N");
  }
  std::vector<std::int32_t> neighbors(static_cast<std::size_t>(n) * k);

  const auto query = [&](std::int64_t i) {
    // best holds up to k (distance, index) pairs, worst last.
    std::vector<std::pair<double, std::int32_t>> best;
    best.reserve(static_cast<std::size_t>(k) + 1);
    const double* fi = features.row(i);
    for (std::int64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = detail::l1_distance(fi, features.row(j));
      if (best.size() == static_cast<std::size_t>(k) &&
          std::make_pair(d, static_cast<std::int32_t>(j)) >= best.back()) {
        continue;
      }
      const std::pair<double, std::int32_t> cand{d, static_cast<std::int32_t>(j)};
      const auto it = std::lower_bound(best.begin(), best.end(), cand);
      best.insert(it, cand);
      if (best.size() > static_cast<std::size_t>(k)) best.pop_back();
    }
    for (int m = 0; m < k; ++m) {
      neighbors[static_cast<std::size_t>(i) * k + m] = best[m].second;
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::int64_t>(hw, n));
  if (n_threads <= 1 || n < 512) {
    for (std::int64_t i = 0; i < n; ++i) query(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::int64_t i = t; i < n; i += n_threads) query(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return neighbors;
}

// Graph Laplacian L = Dg - A over the union of the neighbor relations.
// Affinity a(i,j) = max(0, 1 - |f_i - f_j|_1 / 4); the max() guard keeps
// affinities in [0,1] when spatial_weight exceeds 1.
inline SparseSymMatrix build_knn_laplacian(const FeatureArray& features,
                                           const std::vector<std::int32_t>& neighbors,
                                           int k) {
  const std::int64_t n = features.n;
  if (k < 1 || neighbors.size() != static_cast<std::size_t>(n) * k) {
    throw InvalidArgument("build_knn_laplacian: neighbor list size mismatch");
  }

  // Union pattern plus the diagonal, per-row sorted unique columns.
  std::vector<std::vector<std::int32_t>> adj(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    adj[i].push_back(static_cast<std::int32_t>(i));
    for (int m = 0; m < k; ++m) {
      const std::int32_t j = neighbors[static_cast<std::size_t>(i) * k + m];
      if (j < 0 || j >= n || j == i) {
        throw InvalidArgument("build_knn_laplacian: invalid neighbor index");
      }
      adj[i].push_back(j);
      adj[static_cast<std::size_t>(j)].push_back(static_cast<std::int32_t>(i));
    }
  }
  std::vector<std::int64_t> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    row_ptr[i + 1] = row_ptr[i] + static_cast<std::int64_t>(row.size());
  }
  std::vector<std::int32_t> cols(static_cast<std::size_t>(row_ptr[n]));
  std::vector<double> vals(cols.size(), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    std::copy(adj[i].begin(), adj[i].end(), cols.begin() + row_ptr[i]);
  }

  SparseSymMatrix L(n, std::move(row_ptr), std::move(cols), std::move(vals));
  for (std::int64_t i = 0; i < n; ++i) {
    for (auto j : adj[i]) {
      if (j <= i) continue;  // each undirected edge once
      const double d = detail::l1_distance(features.row(i), features.row(j));
      const double a = std::max(0.0, 1.0 - d / FeatureArray::kDim);
      L.add_at(i, j, -a);
      L.add_at(j, static_cast<std::int32_t>(i), -a);
      L.add_at(i, static_cast<std::int32_t>(i), a);
      L.add_at(j, j, a);
    }
  }
  return L;
}

}  // namespace voxmat
