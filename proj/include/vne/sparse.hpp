#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "vne/error.hpp"

namespace vne {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row storage of a symmetric matrix. Both triangles are
/// stored so that a matvec is a single pass over the rows. Immutable once
/// built; construction validates structure and exact numerical symmetry.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;

  SparseSymMatrix(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<std::size_t> col_indices,
                  std::vector<double> values)
      : n_(n), row_offsets_(std::move(row_offsets)), col_indices_(std::move(col_indices)), values_(std::move(values)) {
    validate();
  }

  /// Builds from arbitrary-order triplets. Every off-diagonal entry must be
  /// supplied for both (i,j) and (j,i); duplicates are rejected.
  static SparseSymMatrix from_triplets(std::size_t n, std::vector<Triplet> entries) {
    for (const auto& t : entries)
      if (t.row >= n || t.col >= n) fail(Errc::dimension_mismatch, "from_triplets: index out of range");
    std::sort(entries.begin(), entries.end(),
              [](const Triplet& a, const Triplet& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    std::vector<std::size_t> offsets(n + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
      if (e > 0 && entries[e].row == entries[e - 1].row && entries[e].col == entries[e - 1].col)
        fail(Errc::invalid_argument, "from_triplets: duplicate entry (" + std::to_string(entries[e].row) + "," +
                                         std::to_string(entries[e].col) + ")");
      ++offsets[entries[e].row + 1];
      cols.push_back(entries[e].col);
      vals.push_back(entries[e].value);
    }
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    return SparseSymMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
  }

  static SparseSymMatrix diagonal(std::span<const double> diag) {
    const std::size_t n = diag.size();
    std::vector<std::size_t> offsets(n + 1);
    std::vector<std::size_t> cols(n);
    for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    return SparseSymMatrix(n, std::move(offsets), std::move(cols), std::vector<double>(diag.begin(), diag.end()));
  }

  std::size_t dim() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  /// y = R·x. O(nnz).
  void matvec(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) fail(Errc::dimension_mismatch, "matvec: dimension mismatch");
    const std::size_t* off = row_offsets_.data();
    const std::size_t* col = col_indices_.data();
    const double* val = values_.data();
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t p = off[i]; p < off[i + 1]; ++p) acc += val[p] * x[col[p]];
      y[i] = acc;
    }
  }

  std::vector<double> matvec(std::span<const double> x) const {
    std::vector<double> y(n_);
    matvec(x, y);
    return y;
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
        if (col_indices_[p] == i) t += values_[p];
    return t;
  }

  /// Unit trace is checked on demand so that intermediate matrices stay representable.
  bool has_unit_trace(double tol = 1e-10) const { return std::abs(trace() - 1.0) <= tol; }

  /// Stored value at (i, j), or 0 when the entry is structurally absent.
  double at(std::size_t i, std::size_t j) const {
    const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
  }

  bool operator==(const SparseSymMatrix&) const = default;

 private:
  void validate() const {
    if (row_offsets_.size() != n_ + 1) fail(Errc::invalid_argument, "SparseSymMatrix: row_offsets must have n+1 entries");
    if (row_offsets_.front() != 0 || row_offsets_.back() != col_indices_.size() ||
        col_indices_.size() != values_.size())
      fail(Errc::invalid_argument, "SparseSymMatrix: inconsistent array lengths");
    for (std::size_t i = 0; i < n_; ++i) {
      if (row_offsets_[i] > row_offsets_[i + 1]) fail(Errc::invalid_argument, "SparseSymMatrix: row_offsets not monotone");
      for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
        if (col_indices_[p] >= n_) fail(Errc::dimension_mismatch, "SparseSymMatrix: column index out of range");
        if (p > row_offsets_[i] && col_indices_[p] <= col_indices_[p - 1])
          fail(Errc::invalid_argument, "SparseSymMatrix: column indices not strictly sorted in row " + std::to_string(i));
        if (!std::isfinite(values_[p])) fail(Errc::invalid_argument, "SparseSymMatrix: non-finite value");
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
        const std::size_t j = col_indices_[p];
        if (j == i) continue;
        const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[j]);
        const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[j + 1]);
        const auto it = std::lower_bound(first, last, i);
        if (it == last || *it != i || values_[static_cast<std::size_t>(it - col_indices_.begin())] != values_[p])
          fail(Errc::not_symmetric,
               "SparseSymMatrix: entry (" + std::to_string(i) + "," + std::to_string(j) + ") has no symmetric partner");
      }
    }
  }

  std::size_t n_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace vne
