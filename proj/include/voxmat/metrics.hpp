#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "voxmat/connectivity.hpp"
#include "voxmat/grid.hpp"

namespace voxmat {

// 3D adaptations of the standard matting metrics (SAD, MSE, Grad., Conn.)
// plus the weighted alpha/gradient training losses, reused here as
// evaluation utilities.

inline double sad(const AlphaMatte& pred, const AlphaMatte& gt) {
  require_same_shape(pred, gt, "sad");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    s += std::abs(static_cast<double>(pred.values[i]) - gt.values[i]);
  }
  return s;
}

inline double mse(const AlphaMatte& pred, const AlphaMatte& gt) {
  require_same_shape(pred, gt, "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const double d = static_cast<double>(pred.values[i]) - gt.values[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.values.size());
}

namespace detail {

struct GaussKernels {
  int radius = 0;
  std::vector<double> smooth;      // normalized to sum 1
  std::vector<double> derivative;  // antisymmetric, unit response to a ramp
};

inline GaussKernels gaussian_derivative_kernels(double sigma) {
  GaussKernels k;
  k.radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int len = 2 * k.radius + 1;
  k.smooth.resize(len);
  k.derivative.resize(len);
  double gsum = 0.0;
  for (int t = -k.radius; t <= k.radius; ++t) {
    const double g = std::exp(-0.5 * t * t / (sigma * sigma));
    k.smooth[t + k.radius] = g;
    gsum += g;
  }
  for (auto& g : k.smooth) g /= gsum;
  // Antisymmetric by construction so constants map to exactly zero;
  // normalized so a unit-slope ramp maps to 1.
  double ramp = 0.0;
  for (int t = 1; t <= k.radius; ++t) {
    const double d = t * std::exp(-0.5 * t * t / (sigma * sigma));
    k.derivative[k.radius + t] = d;
    k.derivative[k.radius - t] = -d;
    ramp += 2.0 * t * d;
  }
  for (auto& d : k.derivative) d /= ramp;
  return k;
}

// Separable convolution along one axis with edge clamping. Per-axis
// clamping composes, so the separable result equals the full 3D kernel.
inline void convolve_axis(const std::array<int, 3>& dims,
                          const std::vector<double>& in,
                          std::vector<double>& out, int axis,
                          const std::vector<double>& kernel, int radius) {
  const int nx = dims[0], ny = dims[1], nz = dims[2];
  const std::int64_t stride[3] = {1, nx, static_cast<std::int64_t>(nx) * ny};
  const int extent = dims[axis];
  out.resize(in.size());
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        const int pos[3] = {x, y, z};
        const std::int64_t base =
            x + static_cast<std::int64_t>(nx) * (y + static_cast<std::int64_t>(ny) * z);
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
          const int s = std::clamp(pos[axis] + t, 0, extent - 1);
          acc += kernel[t + radius] * in[base + (s - pos[axis]) * stride[axis]];
        }
        out[base] = acc;
      }
}

inline std::vector<double> gaussian_gradient_axis(const AlphaMatte& m,
                                                  const GaussKernels& k,
                                                  int axis) {
  std::vector<double> cur(m.values.begin(), m.values.end());
  std::vector<double> next;
  for (int a = 0; a < 3; ++a) {
    convolve_axis(m.dims, cur, next, a,
                  a == axis ? k.derivative : k.smooth, k.radius);
    cur.swap(next);
  }
  return cur;
}

}  // namespace detail

// Sum over voxels and axes of squared differences between Gaussian-derivative
// responses of the two mattes (sigma in voxels, kernel radius ceil(3 sigma),
// edges clamped).
inline double grad_error(const AlphaMatte& pred, const AlphaMatte& gt,
                         double sigma_vox = 1.4) {
  require_same_shape(pred, gt, "grad_error");
  if (sigma_vox <= 0.0) {
    throw InvalidArgument("grad_error: sigma must be positive");
  }
  const auto kernels = detail::gaussian_derivative_kernels(sigma_vox);
  double err = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const auto gp = detail::gaussian_gradient_axis(pred, kernels, axis);
    const auto gg = detail::gaussian_gradient_axis(gt, kernels, axis);
    for (std::size_t i = 0; i < gp.size(); ++i) {
      const double d = gp[i] - gg[i];
      err += d * d;
    }
  }
  return err;
}

struct ConnParams {
  double theta_step = 0.1;
  double delta = 0.15;
};

namespace detail {

// Per-voxel largest threshold level at which the voxel is 26-connected to
// the source region within {m >= theta}.
inline std::vector<double> connectivity_levels(
    const AlphaMatte& m, const std::vector<std::uint8_t>& omega,
    double theta_step) {
  const std::int64_t n = m.size();
  std::vector<double> level(static_cast<std::size_t>(n), 0.0);
  const int steps = static_cast<int>(std::floor(1.0 / theta_step + 1e-9));
  std::vector<std::uint8_t> in_set(static_cast<std::size_t>(n));
  for (int t = 0; t <= steps; ++t) {
    const double theta = t * theta_step;
    bool any_seed = false;
    for (std::int64_t i = 0; i < n; ++i) {
      in_set[i] = m.values[i] >= theta ? 1 : 0;
      any_seed = any_seed || (in_set[i] && omega[i]);
    }
    if (!any_seed) break;  // higher levels are unreachable too
    const auto reached = reachable_26(m.dims, in_set, omega);
    for (std::int64_t i = 0; i < n; ++i) {
      if (reached[i]) level[i] = theta;
    }
  }
  return level;
}

}  // namespace detail

// Connectivity discrepancy. The source region Omega is the largest
// 26-connected component of {min(pred,gt) >= 1 - theta_step}; for each matte
// the per-voxel degradation d_i = m_i - l_i is turned into
// phi_i = 1 - d_i*[d_i >= delta] and the error is sum |phi(pred) - phi(gt)|.
// With an empty Omega the error falls back to sum |pred - gt|.
inline double conn_error(const AlphaMatte& pred, const AlphaMatte& gt,
                         const ConnParams& params = {}) {
  require_same_shape(pred, gt, "conn_error");
  if (params.theta_step <= 0.0 || params.theta_step > 1.0) {
    throw InvalidArgument("conn_error: theta_step must be in (0,1]");
  }
  const std::int64_t n = pred.size();
  std::vector<std::uint8_t> core(static_cast<std::size_t>(n));
  const double omega_threshold = 1.0 - params.theta_step;
  bool any = false;
  for (std::int64_t i = 0; i < n; ++i) {
    core[i] = std::min(pred.values[i], gt.values[i]) >= omega_threshold ? 1 : 0;
    any = any || core[i];
  }
  if (!any) {
    return sad(pred, gt);
  }
  int count = 0;
  const auto labels = label_components_26(pred.dims, core, &count);
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(count), 0);
  for (std::int64_t i = 0; i < n; ++i) {
    if (labels[i] >= 0) ++sizes[labels[i]];
  }
  const int largest = static_cast<int>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<std::uint8_t> omega(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) omega[i] = labels[i] == largest ? 1 : 0;

  const auto lp = detail::connectivity_levels(pred, omega, params.theta_step);
  const auto lg = detail::connectivity_levels(gt, omega, params.theta_step);
  double err = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double dp = pred.values[i] - lp[i];
    const double dg = gt.values[i] - lg[i];
    const double phip = 1.0 - (dp >= params.delta ? dp : 0.0);
    const double phig = 1.0 - (dg >= params.delta ? dg : 0.0);
    err += std::abs(phip - phig);
  }
  return err;
}

// Mean L1 difference with doubled weight inside the union mask, normalized
// by the total voxel count.
inline double weighted_alpha_loss(const AlphaMatte& pred, const AlphaMatte& gt,
                                  const LabelMask& union_mask) {
  require_same_shape(pred, gt, "weighted_alpha_loss");
  require_same_shape(pred, union_mask, "weighted_alpha_loss");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const double w = 1.0 + (union_mask.values[i] ? 1.0 : 0.0);
    s += w * std::abs(static_cast<double>(pred.values[i]) - gt.values[i]);
  }
  return s / static_cast<double>(pred.values.size());
}

namespace detail {

// Central differences, one-sided at the edges.
inline std::array<double, 3> finite_gradient(const AlphaMatte& m, int x, int y,
                                             int z) {
  const auto sample = [&](int xx, int yy, int zz) {
    return static_cast<double>(m.at(xx, yy, zz));
  };
  std::array<double, 3> g{};
  const int pos[3] = {x, y, z};
  for (int axis = 0; axis < 3; ++axis) {
    const int extent = m.dims[axis];
    int lo[3] = {x, y, z}, hi[3] = {x, y, z};
    hi[axis] = std::min(pos[axis] + 1, extent - 1);
    lo[axis] = std::max(pos[axis] - 1, 0);
    const double span = hi[axis] - lo[axis];
    g[axis] = span > 0.0
                  ? (sample(hi[0], hi[1], hi[2]) - sample(lo[0], lo[1], lo[2])) / span
                  : 0.0;
  }
  return g;
}

}  // namespace detail

// Same weighting as weighted_alpha_loss over the L1 difference of the
// 3-component finite-difference gradients.
inline double weighted_grad_loss(const AlphaMatte& pred, const AlphaMatte& gt,
                                 const LabelMask& union_mask) {
  require_same_shape(pred, gt, "weighted_grad_loss");
  require_same_shape(pred, union_mask, "weighted_grad_loss");
  double s = 0.0;
  std::int64_t i = 0;
  for (int z = 0; z < pred.dims[2]; ++z)
    for (int y = 0; y < pred.dims[1]; ++y)
      for (int x = 0; x < pred.dims[0]; ++x, ++i) {
        const auto gp = detail::finite_gradient(pred, x, y, z);
        const auto gg = detail::finite_gradient(gt, x, y, z);
        const double w = 1.0 + (union_mask.values[i] ? 1.0 : 0.0);
        s += w * (std::abs(gp[0] - gg[0]) + std::abs(gp[1] - gg[1]) +
                  std::abs(gp[2] - gg[2]));
      }
  return s / static_cast<double>(pred.size());
}

// Raw metric values plus the reporting convention scales
// (SAD/Grad./Conn. x 1e-2, MSE x 1e3).
struct MatteMetrics {
  double sad = 0.0;
  double mse = 0.0;
  double grad = 0.0;
  double conn = 0.0;

  static constexpr double kSadScale = 1e-2;
  static constexpr double kMseScale = 1e3;
  static constexpr double kGradScale = 1e-2;
  static constexpr double kConnScale = 1e-2;

  [[nodiscard]] double sad_scaled() const { return sad * kSadScale; }
  [[nodiscard]] double mse_scaled() const { return mse * kMseScale; }
  [[nodiscard]] double grad_scaled() const { return grad * kGradScale; }
  [[nodiscard]] double conn_scaled() const { return conn * kConnScale; }
};

inline MatteMetrics compute_metrics(const AlphaMatte& pred, const AlphaMatte& gt,
                                    double grad_sigma_vox = 1.4,
                                    const ConnParams& conn_params = {}) {
  MatteMetrics m;
  m.sad = sad(pred, gt);
  m.mse = mse(pred, gt);
  m.grad = grad_error(pred, gt, grad_sigma_vox);
  m.conn = conn_error(pred, gt, conn_params);
  return m;
}

struct MetricStat {
  double mean = 0.0;
  double std_dev = 0.0;  // population
};

struct AggregateReport {
  std::vector<MatteMetrics> cases;
  MetricStat sad, mse, grad, conn;

  [[nodiscard]] std::string sad_formatted() const {
    return format(sad, MatteMetrics::kSadScale);
  }
  [[nodiscard]] std::string mse_formatted() const {
    return format(mse, MatteMetrics::kMseScale);
  }
  [[nodiscard]] std::string grad_formatted() const {
    return format(grad, MatteMetrics::kGradScale);
  }
  [[nodiscard]] std::string conn_formatted() const {
    return format(conn, MatteMetrics::kConnScale);
  }

  // "mean(±std)" with the reporting scale applied, e.g. "152.62(±7.38)".
  [[nodiscard]] static std::string format(const MetricStat& s, double scale) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f(±%.2f)", s.mean * scale,
                  s.std_dev * scale);
    return buf;
  }
};

inline AggregateReport aggregate(const std::vector<MatteMetrics>& cases) {
  if (cases.empty()) {
    throw InvalidArgument("aggregate: need at least one case");
  }
  AggregateReport rep;
  rep.cases = cases;
  const auto stat = [&](auto field) {
    MetricStat s;
    for (const auto& c : cases) s.mean += c.*field;
    s.mean /= static_cast<double>(cases.size());
    double var = 0.0;
    for (const auto& c : cases) {
      const double d = c.*field - s.mean;
      var += d * d;
    }
    s.std_dev = std::sqrt(var / static_cast<double>(cases.size()));
    return s;
  };
  rep.sad = stat(&MatteMetrics::sad);
  rep.mse = stat(&MatteMetrics::mse);
  rep.grad = stat(&MatteMetrics::grad);
  rep.conn = stat(&MatteMetrics::conn);
  return rep;
}

}  // namespace voxmat
