#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "voxmat/cf_laplacian.hpp"
#include "voxmat/grid.hpp"
#include "voxmat/knn_laplacian.hpp"
#include "voxmat/sparse.hpp"
#include "voxmat/trimap.hpp"
#include "voxmat/volume_ops.hpp"

namespace voxmat {

enum class Preconditioner { None, Jacobi };

struct SolveOptions {
  double tol_rel_residual = 1e-7;
  int max_iterations = 2000;
  Preconditioner preconditioner = Preconditioner::Jacobi;
  bool clamp_output = true;

  void validate() const {
    if (!(tol_rel_residual > 0.0 && tol_rel_residual < 1.0)) {
      throw InvalidArgument("SolveOptions: tol must be in (0,1)");
    }
    if (max_iterations < 1) {
      throw InvalidArgument("SolveOptions: max_iterations must be >= 1");
    }
  }
};

struct SolveReport {
  int iterations = 0;
  double final_rel_residual = 0.0;
  bool converged = false;
  double wall_time_s = 0.0;
};

// Normal equations of the penalty objective
//   argmin_a  a'La + lambda (a - s)' D (a - s):
// A = L + lambda*D (diagonal bump at constrained voxels), b = lambda*D*s.
inline std::pair<SparseSymMatrix, std::vector<double>> assemble_system(
    const SparseSymMatrix& L, const SoftConstraint& c) {
  const auto n = L.size();
  if (c.s_values.size() != static_cast<std::size_t>(n) ||
      c.constrained.size() != static_cast<std::size_t>(n)) {
    throw ShapeMismatch("assemble_system: constraint size != matrix size");
  }
  SparseSymMatrix A = L;
  std::vector<double> b(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    if (!c.constrained[i]) continue;
    A.add_at(i, static_cast<std::int32_t>(i), c.lambda);
    b[i] = c.lambda * c.s_values[i];
  }
  return {std::move(A), std::move(b)};
}

namespace detail {

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// Preconditioned conjugate gradient from x0 = 0. Stops when the true
// relative residual |Ax-b| / |b| falls below tol or iterations run out;
// the recurrence residual triggers the check, the explicit residual
// confirms it.
inline std::pair<std::vector<double>, SolveReport> pcg_solve(
    const SparseSymMatrix& A, const std::vector<double>& b,
    const SolveOptions& opts) {
  opts.validate();
  const auto n = A.size();
  if (b.size() != static_cast<std::size_t>(n)) {
    throw ShapeMismatch("pcg_solve: rhs size != matrix size");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const double nb = detail::norm2(b);
  if (!std::isfinite(nb)) {
    throw NumericalBreakdown("pcg_solve: right-hand side not finite");
  }
  if (nb == 0.0) {
    throw SingularSystem("pcg_solve: zero right-hand side (no constraints)");
  }

  std::vector<double> inv_diag;
  if (opts.preconditioner == Preconditioner::Jacobi) {
    inv_diag = A.diagonal();
    for (auto& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;
  }
  const auto apply_precond = [&](const std::vector<double>& r,
                                 std::vector<double>& z) {
    if (inv_diag.empty()) {
      z = r;
    } else {
      z.resize(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag[i] * r[i];
    }
  };

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<double> r = b;
  std::vector<double> z, p, Ap(static_cast<std::size_t>(n));
  apply_precond(r, z);
  p = z;
  double rz = detail::dot(r, z);

  SolveReport report;
  double rel = 1.0;
  const auto true_rel_residual = [&] {
    A.matvec(x, Ap);
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double ri = b[i] - Ap[i];
      s += ri * ri;
    }
    return std::sqrt(s) / nb;
  };

  for (int it = 1; it <= opts.max_iterations; ++it) {
    A.matvec(p, Ap);
    const double pAp = detail::dot(p, Ap);
    if (!std::isfinite(pAp)) {
      throw NumericalBreakdown("pcg_solve: non-finite curvature");
    }
    if (pAp <= 0.0) {
      throw NumericalBreakdown("pcg_solve: matrix is not positive definite");
    }
    const double alpha = rz / pAp;
    for (std::int64_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    report.iterations = it;
    rel = detail::norm2(r) / nb;
    if (!std::isfinite(rel)) {
      throw NumericalBreakdown("pcg_solve: non-finite residual");
    }
    if (rel <= opts.tol_rel_residual) {
      rel = true_rel_residual();
      if (rel <= opts.tol_rel_residual) {
        report.converged = true;
        break;
      }
      // Recurrence drifted from the true residual; restart from it.
      A.matvec(x, Ap);
      for (std::int64_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
      apply_precond(r, z);
      p = z;
      rz = detail::dot(r, z);
      continue;
    }
    apply_precond(r, z);
    const double rz_new = detail::dot(r, z);
    const double beta = rz_new / rz;
    for (std::int64_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rz = rz_new;
  }

  if (!report.converged) {
    rel = true_rel_residual();
    report.converged = rel <= opts.tol_rel_residual;
  }
  report.final_rel_residual = rel;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(x), report};
}

enum class MattingMethod { CF, KNN };

struct MattingConfig {
  MattingMethod method = MattingMethod::CF;
  bool calibrated = false;
  double lambda = 100.0;
  double window_min_hu = -1350.0;  // lung window
  double window_max_hu = 150.0;
  CfParams cf;
  KnnParams knn;
  SolveOptions solve;
};

// End-to-end matting: build constraints (binary, or HU-calibrated for the
// "+" variants), build the method's Laplacian on the windowed volume,
// assemble and solve, clamp to [0,1] unless disabled. A non-converged solve
// is returned with converged == false, not thrown.
inline std::pair<AlphaMatte, SolveReport> solve_alpha(
    const VolumeGrid& vol, const Trimap& trimap, const MattingConfig& cfg) {
  require_nondegenerate(vol, "solve_alpha");
  require_same_shape(vol, trimap, "solve_alpha");
  if (cfg.calibrated && vol.unit != Unit::HU) {
    throw InvalidArgument("solve_alpha: calibrated constraints need HU input");
  }

  const VolumeGrid normalized =
      vol.unit == Unit::HU
          ? clamp_window(vol, cfg.window_min_hu, cfg.window_max_hu)
          : vol;
  const SoftConstraint constraints =
      cfg.calibrated
          ? hu_calibrated_constraints(
                vol, trimap,
                HuCalibration::from_window(cfg.window_min_hu, cfg.window_max_hu),
                cfg.lambda)
          : binary_constraints(trimap, cfg.lambda);
  if (constraints.constrained_count() == 0) {
    throw SingularSystem("solve_alpha: trimap constrains no voxels");
  }

  SparseSymMatrix L;
  if (cfg.method == MattingMethod::CF) {
    L = build_cf_laplacian(normalized, cfg.cf);
  } else {
    const FeatureArray f = build_features(normalized, cfg.knn.spatial_weight);
    const auto neighbors = knn_graph(f, cfg.knn.k_neighbors);
    L = build_knn_laplacian(f, neighbors, cfg.knn.k_neighbors);
  }

  auto [A, b] = assemble_system(L, constraints);
  auto [x, report] = pcg_solve(A, b, cfg.solve);

  AlphaMatte matte;
  matte.dims = vol.dims;
  matte.spacing = vol.spacing;
  matte.values.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = cfg.solve.clamp_output ? std::clamp(x[i], 0.0, 1.0) : x[i];
    matte.values[i] = static_cast<float>(v);
  }
  return {std::move(matte), report};
}

}  // namespace voxmat
