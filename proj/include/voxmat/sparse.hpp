#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "voxmat/errors.hpp"

namespace voxmat {

// Symmetric sparse matrix in compressed sparse rows with sorted, unique
// columns per row. Symmetry is a contract of the builders, not re-enforced
// here; symmetry_defect() measures it for tests.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  SparseSymMatrix(std::int64_t n, std::vector<std::int64_t> row_ptr,
                  std::vector<std::int32_t> cols, std::vector<double> vals)
      : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)),
        vals_(std::move(vals)) {
    if (row_ptr_.size() != static_cast<std::size_t>(n_) + 1 ||
        cols_.size() != vals_.size() ||
        row_ptr_.back() != static_cast<std::int64_t>(cols_.size())) {
      throw InvalidArgument("SparseSymMatrix: inconsistent CSR arrays");
    }
  }

  [[nodiscard]] std::int64_t size() const { return n_; }
  [[nodiscard]] std::int64_t nnz() const {
    return static_cast<std::int64_t>(cols_.size());
  }

  [[nodiscard]] std::span<const std::int32_t> row_cols(std::int64_t r) const {
    return {cols_.data() + row_ptr_[r],
            static_cast<std::size_t>(row_ptr_[r + 1] - row_ptr_[r])};
  }
  [[nodiscard]] std::span<const double> row_vals(std::int64_t r) const {
    return {vals_.data() + row_ptr_[r],
            static_cast<std::size_t>(row_ptr_[r + 1] - row_ptr_[r])};
  }

  // Position of (r, c) in the value array, or -1 when structurally absent.
  [[nodiscard]] std::int64_t find(std::int64_t r, std::int32_t c) const {
    const auto* first = cols_.data() + row_ptr_[r];
    const auto* last = cols_.data() + row_ptr_[r + 1];
    const auto* it = std::lower_bound(first, last, c);
    if (it == last || *it != c) return -1;
    return row_ptr_[r] + (it - first);
  }

  [[nodiscard]] double at(std::int64_t r, std::int32_t c) const {
    const auto pos = find(r, c);
    return pos < 0 ? 0.0 : vals_[pos];
  }

  void add_at(std::int64_t r, std::int32_t c, double v) {
    const auto pos = find(r, c);
    if (pos < 0) {
      throw InvalidArgument("SparseSymMatrix: entry not in pattern");
    }
    vals_[pos] += v;
  }

  void matvec(std::span<const double> x, std::span<double> y) const {
    for (std::int64_t r = 0; r < n_; ++r) {
      double acc = 0.0;
      for (std::int64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        acc += vals_[p] * x[static_cast<std::size_t>(cols_[p])];
      }
      y[static_cast<std::size_t>(r)] = acc;
    }
  }

  [[nodiscard]] std::vector<double> diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    for (std::int64_t r = 0; r < n_; ++r) {
      d[static_cast<std::size_t>(r)] = at(r, static_cast<std::int32_t>(r));
    }
    return d;
  }

  [[nodiscard]] double symmetry_defect() const {
    double worst = 0.0;
    for (std::int64_t r = 0; r < n_; ++r) {
      for (std::int64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        const double d = std::abs(vals_[p] - at(cols_[p], static_cast<std::int32_t>(r)));
        worst = std::max(worst, d);
      }
    }
    return worst;
  }

  [[nodiscard]] double max_abs_row_sum() const {
    double worst = 0.0;
    for (std::int64_t r = 0; r < n_; ++r) {
      double s = 0.0;
      for (std::int64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += vals_[p];
      worst = std::max(worst, std::abs(s));
    }
    return worst;
  }

  [[nodiscard]] const std::vector<std::int64_t>& row_ptr() const { return row_ptr_; }
  [[nodiscard]] const std::vector<std::int32_t>& cols() const { return cols_; }
  [[nodiscard]] const std::vector<double>& vals() const { return vals_; }
  [[nodiscard]] std::vector<double>& vals() { return vals_; }

 private:
  std::int64_t n_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<std::int32_t> cols_;
  std::vector<double> vals_;
};

}  // namespace voxmat
