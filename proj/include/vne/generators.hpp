#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vne/dense.hpp"
#include "vne/entropy.hpp"
#include "vne/error.hpp"
#include "vne/rng.hpp"
#include "vne/sparse.hpp"

namespace vne {

struct GeneratedMatrix {
  SparseSymMatrix matrix;
  SpectralModel spectrum;
};

enum class Decay { exponential, linear };

/// R = GGᵀ / trace(GGᵀ) with G an n×n standard Gaussian matrix (real
/// Hilbert–Schmidt analogue of a Haar-random density matrix). The spectrum is
/// filled from the exact oracle when n ≤ oracle_limit and left empty otherwise.
inline GeneratedMatrix generate_haar_like_density(std::size_t n, RngStream stream,
                                                  std::size_t oracle_limit = kDefaultOracleLimit) {
  require(n >= 1, Errc::empty_dimension, "generate_haar_like_density: n must be at least 1");
  const DenseMatrix g(n, n, gaussian_vector(stream, n * n));
  DenseMatrix w(n, n);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto gi = g.row(i);
    for (std::size_t j = i; j < n; ++j) w(i, j) = dot(gi, g.row(j));
    trace += w(i, i);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) w(i, j) /= trace;
  GeneratedMatrix out{dense_to_sparse(w), {}};
  if (n <= oracle_limit) out.spectrum = exact_entropy(out.matrix, oracle_limit).spectrum;
  return out;
}

/// tridiag(−1, 2, −1) / (2n): the normalized 1-D Poisson matrix with its closed-form spectrum.
inline GeneratedMatrix generate_tridiagonal_poisson(std::size_t n) {
  require(n >= 2, Errc::invalid_argument, "generate_tridiagonal_poisson: n must be at least 2");
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(3 * n);
  vals.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      cols.push_back(i - 1);
      vals.push_back(-scale);
    }
    cols.push_back(i);
    vals.push_back(2.0 * scale);
    if (i + 1 < n) {
      cols.push_back(i + 1);
      vals.push_back(-scale);
    }
    offsets[i + 1] = cols.size();
  }
  GeneratedMatrix out{SparseSymMatrix(n, std::move(offsets), std::move(cols), std::move(vals)), {}};
  out.spectrum.probs.resize(n);
  const double denom = 2.0 * static_cast<double>(n) + 2.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double s = std::sin(static_cast<double>(i) * std::numbers::pi / denom);
    // sin² is increasing on (0, π/2), so index n-i gives descending order.
    out.spectrum.probs[n - i] = 4.0 * scale * s * s;
  }
  return out;
}

/// R = Q·diag(probs)·Qᵀ with Q the Householder Q of an n×k Gaussian matrix, k = probs.size().
/// probs must be descending and sum to one; the matrix is stored with dense fill.
inline GeneratedMatrix generate_from_spectrum(std::size_t n, std::span<const double> probs, RngStream stream) {
  const std::size_t k = probs.size();
  require(k >= 1 && k <= n, Errc::invalid_argument, "generate_from_spectrum: need 1 <= k <= n");
  SpectralModel model{std::vector<double>(probs.begin(), probs.end()), std::nullopt};
  model.validate();
  DenseMatrix q = householder_qr(DenseMatrix(n, k, gaussian_vector(stream, n * k)));
  DenseMatrix r(n, n);
  std::vector<double> scaled(k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto qi = q.row(i);
    for (std::size_t c = 0; c < k; ++c) scaled[c] = qi[c] * probs[c];
    for (std::size_t j = i; j < n; ++j) r(i, j) = dot(scaled, q.row(j));
  }
  model.basis = std::move(q);
  return {dense_to_sparse(r), std::move(model)};
}

inline std::vector<double> normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  for (double& w : weights) w /= sum;
  return weights;
}

/// Rank-k density matrix with probabilities ∝ e^{-i} or ∝ (k − i + 1), i = 1..k.
inline GeneratedMatrix generate_low_rank_density(std::size_t n, std::size_t k, Decay decay, RngStream stream) {
  if (k == 0 || k > n) fail(Errc::invalid_argument, "generate_low_rank_density: need 1 <= k <= n");
  std::vector<double> w(k);
  for (std::size_t i = 1; i <= k; ++i)
    w[i - 1] = decay == Decay::exponential ? std::exp(-static_cast<double>(i)) : static_cast<double>(k - i + 1);
  return generate_from_spectrum(n, normalized(std::move(w)), stream);
}

/// Full-rank density matrix: top-k weights k, k−1, …, 1, remaining n−k weights 1, normalized.
inline GeneratedMatrix generate_linear_plus_uniform(std::size_t n, std::size_t k, RngStream stream) {
  if (k == 0 || k > n) fail(Errc::invalid_argument, "generate_linear_plus_uniform: need 1 <= k <= n");
  std::vector<double> w(n, 1.0);
  for (std::size_t i = 1; i <= k; ++i) w[i - 1] = static_cast<double>(k - i + 1);
  return generate_from_spectrum(n, normalized(std::move(w)), stream);
}

}  // namespace vne
