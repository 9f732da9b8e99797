#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vne/error.hpp"
#include "vne/parallel.hpp"
#include "vne/sparse.hpp"

namespace vne {

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    require(data_.size() == rows_ * cols_, Errc::dimension_mismatch, "DenseMatrix: rows*cols != entries");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> entries() const noexcept { return data_; }
  std::span<double> entries() noexcept { return data_; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  double frobenius_norm() const {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return std::sqrt(acc);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  return t;
}

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), Errc::dimension_mismatch, "multiply: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

/// BᵀB, computed on the upper triangle and mirrored so the result is exactly symmetric.
inline DenseMatrix gram(const DenseMatrix& b) {
  const std::size_t s = b.cols();
  DenseMatrix g(s, s);
  for (std::size_t r = 0; r < b.rows(); ++r) {
    const auto br = b.row(r);
    for (std::size_t i = 0; i < s; ++i) {
      const double bi = br[i];
      if (bi == 0.0) continue;
      auto gi = g.row(i);
      for (std::size_t j = i; j < s; ++j) gi[j] += bi * br[j];
    }
  }
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

inline DenseMatrix to_dense(const SparseSymMatrix& r) {
  DenseMatrix d(r.dim(), r.dim());
  const auto off = r.row_offsets();
  const auto col = r.col_indices();
  const auto val = r.values();
  for (std::size_t i = 0; i < r.dim(); ++i)
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) d(i, col[p]) = val[p];
  return d;
}

/// Stores every entry of a symmetric dense matrix explicitly (dense fill).
/// The lower triangle is taken from the upper one so the result is exactly symmetric.
inline SparseSymMatrix dense_to_sparse(const DenseMatrix& a) {
  require(a.rows() == a.cols(), Errc::dimension_mismatch, "dense_to_sparse: matrix must be square");
  const std::size_t n = a.rows();
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n * n);
  std::vector<double> vals(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = (i + 1) * n;
    for (std::size_t j = 0; j < n; ++j) {
      cols[i * n + j] = j;
      vals[i * n + j] = i <= j ? a(i, j) : a(j, i);
    }
  }
  return SparseSymMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

/// Thin Q factor of A (n×k, n ≥ k) by Householder reflections.
inline DenseMatrix householder_qr(const DenseMatrix& a) {
  const std::size_t n = a.rows(), k = a.cols();
  require(k >= 1 && n >= k, Errc::invalid_argument, "householder_qr: need n >= k >= 1");
  const double tol = 1e-12 * a.frobenius_norm();
  DenseMatrix work = a;
  std::vector<std::vector<double>> reflectors(k);

  for (std::size_t j = 0; j < k; ++j) {
    double norm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) norm2 += work(i, j) * work(i, j);
    const double norm = std::sqrt(norm2);
    if (!(norm > tol))
      fail(Errc::rank_deficient, "householder_qr: column " + std::to_string(j) + " is numerically dependent");
    std::vector<double> v(n - j);
    for (std::size_t i = j; i < n; ++i) v[i - j] = work(i, j);
    v[0] += std::copysign(norm, v[0]);
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    const double vnorm = std::sqrt(vnorm2);
    for (double& x : v) x /= vnorm;
    for (std::size_t c = j; c < k; ++c) {
      double proj = 0.0;
      for (std::size_t i = j; i < n; ++i) proj += v[i - j] * work(i, c);
      for (std::size_t i = j; i < n; ++i) work(i, c) -= 2.0 * proj * v[i - j];
    }
    reflectors[j] = std::move(v);
  }

  // Q = H_0 H_1 ... H_{k-1} applied to the first k columns of the identity.
  DenseMatrix q(n, k);
  for (std::size_t c = 0; c < k; ++c) q(c, c) = 1.0;
  for (std::size_t jj = k; jj-- > 0;) {
    const auto& v = reflectors[jj];
    for (std::size_t c = 0; c < k; ++c) {
      double proj = 0.0;
      for (std::size_t i = jj; i < n; ++i) proj += v[i - jj] * q(i, c);
      if (proj == 0.0) continue;
      for (std::size_t i = jj; i < n; ++i) q(i, c) -= 2.0 * proj * v[i - jj];
    }
  }
  return q;
}

inline constexpr std::size_t kDefaultOracleLimit = 4096;

struct EighOptions {
  std::size_t max_sweeps = 100;
  bool want_vectors = true;
  std::size_t size_limit = kDefaultOracleLimit;
  unsigned threads = 1;  ///< results do not depend on this
};

struct EighResult {
  std::vector<double> values;  ///< ascending
  DenseMatrix vectors;         ///< column i pairs with values[i]; empty when not requested
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi eigensolver for dense symmetric matrices. Converged when the
/// off-diagonal Frobenius norm falls to 1e-12·‖A‖_F.
inline EighResult jacobi_eigh(const DenseMatrix& input, const EighOptions& opts = {}) {
  const std::size_t n = input.rows();
  require(n == input.cols(), Errc::dimension_mismatch, "jacobi_eigh: matrix must be square");
  if (n > opts.size_limit)
    fail(Errc::oracle_limit, "jacobi_eigh: n = " + std::to_string(n) + " exceeds oracle limit " +
                                 std::to_string(opts.size_limit));
  const double amax = input.max_abs();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > 1e-10 * amax) fail(Errc::not_symmetric, "jacobi_eigh: input not symmetric");

  DenseMatrix a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  // Eigenvectors are accumulated as rows of vt (vt = Vᵀ) so rotations touch contiguous memory.
  DenseMatrix vt = opts.want_vectors ? DenseMatrix::identity(n) : DenseMatrix();

  const double target = 1e-12 * input.frobenius_norm();
  auto off_norm = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) acc += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(acc);
  };

  struct Rotation {
    std::size_t p, q;
    double c, s;
    bool active;
  };
  const auto rotate_rows = [](std::span<double> rp, std::span<double> rq, double c, double s) {
    for (std::size_t k = 0; k < rp.size(); ++k) {
      const double x = rp[k], y = rq[k];
      rp[k] = c * x - s * y;
      rq[k] = s * x + c * y;
    }
  };
  const std::size_t players = n + (n % 2);  // index n is the bye when n is odd
  std::vector<std::size_t> slot(players);
  std::iota(slot.begin(), slot.end(), 0);
  std::vector<Rotation> rots(players / 2);

  EighResult result;
  double off = off_norm();
  std::size_t sweep = 0;
  while (off > target) {
    if (sweep == opts.max_sweeps)
      fail(Errc::no_convergence, "jacobi_eigh: no convergence after " + std::to_string(sweep) +
                                     " sweeps, off-diagonal residual " + std::to_string(off));
    ++sweep;
    // Round-robin ordering: each round is n′/2 disjoint pairs, so a round is
    // A ← JᵀAJ with J a product of commuting rotations, applied as one pass
    // over rows p, q and one pass over every row's columns p, q.
    for (std::size_t round = 0; round + 1 < players; ++round) {
      for (std::size_t i = 0; i < players / 2; ++i) {
        std::size_t p = slot[i], q = slot[players - 1 - i];
        if (p > q) std::swap(p, q);
        Rotation& rot = rots[i];
        rot = {p, q, 1.0, 0.0, false};
        if (q >= n) continue;  // bye
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        rot.c = 1.0 / std::hypot(t, 1.0);
        rot.s = t * rot.c;
        rot.active = true;
      }
      parallel_for(players / 2, opts.threads, [&](std::size_t i) {
        const Rotation& rot = rots[i];
        if (!rot.active) return;
        rotate_rows(a.row(rot.p), a.row(rot.q), rot.c, rot.s);
        if (opts.want_vectors) rotate_rows(vt.row(rot.p), vt.row(rot.q), rot.c, rot.s);
      });
      parallel_for(n, opts.threads, [&](std::size_t k) {
        auto rk = a.row(k);
        for (const Rotation& rot : rots) {
          if (!rot.active) continue;
          const double x = rk[rot.p], y = rk[rot.q];
          rk[rot.p] = rot.c * x - rot.s * y;
          rk[rot.q] = rot.s * x + rot.c * y;
        }
      });
      for (const Rotation& rot : rots)
        if (rot.active) a(rot.p, rot.q) = a(rot.q, rot.p) = 0.0;
      std::rotate(slot.begin() + 1, slot.end() - 1, slot.end());
    }
    off = off_norm();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  result.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.values[i] = a(order[i], order[i]);
  if (opts.want_vectors) {
    result.vectors = DenseMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) result.vectors(k, i) = vt(order[i], k);
  }
  result.sweeps = sweep;
  return result;
}

/// Largest `top` singular values of B, descending, from the eigenvalues of the
/// smaller Gram matrix (BᵀB or BBᵀ). Negative Gram eigenvalues are clamped to 0.
inline std::vector<double> thin_singular_values(const DenseMatrix& b, std::size_t top,
                                                std::size_t size_limit = kDefaultOracleLimit) {
  if (top == 0) return {};
  require(top <= std::min(b.rows(), b.cols()), Errc::invalid_argument,
          "thin_singular_values: top exceeds min(rows, cols)");
  const DenseMatrix g = b.cols() <= b.rows() ? gram(b) : gram(transpose(b));
  EighOptions opts;
  opts.want_vectors = false;
  opts.size_limit = size_limit;
  auto eig = jacobi_eigh(g, opts);
  std::vector<double> sv;
  sv.reserve(top);
  for (std::size_t i = 0; i < top; ++i) sv.push_back(std::sqrt(std::max(0.0, eig.values[eig.values.size() - 1 - i])));
  return sv;
}

}  // namespace vne
