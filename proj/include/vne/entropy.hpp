#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vne/dense.hpp"
#include "vne/error.hpp"
#include "vne/sparse.hpp"

namespace vne {

/// Known eigenvalues (probabilities of the pure states) of a density matrix,
/// descending, with an optional orthonormal basis whose column i pairs with probs[i].
/// Eigenvalues not listed are zero.
struct SpectralModel {
  std::vector<double> probs;
  std::optional<DenseMatrix> basis;

  bool empty() const noexcept { return probs.empty(); }
  double p_max() const { return probs.empty() ? 0.0 : probs.front(); }
  /// Smallest eigenvalue of an n×n matrix described by this model.
  double p_min(std::size_t n) const {
    if (probs.empty() || probs.size() < n) return 0.0;
    return probs.back();
  }

  void validate(double sum_tol = 1e-10, double orth_tol = 1e-8) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!(probs[i] >= 0.0)) fail(Errc::negative_probability, "SpectralModel: negative probability");
      if (i > 0 && probs[i] > probs[i - 1]) fail(Errc::invalid_argument, "SpectralModel: probabilities not descending");
      sum += probs[i];
    }
    if (std::abs(sum - 1.0) > sum_tol) fail(Errc::invalid_argument, "SpectralModel: probabilities do not sum to 1");
    if (basis) {
      if (basis->cols() != probs.size()) fail(Errc::dimension_mismatch, "SpectralModel: basis/probs size mismatch");
      const DenseMatrix g = gram(*basis);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j)
          if (std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) > orth_tol)
            fail(Errc::invalid_argument, "SpectralModel: basis not orthonormal");
    }
  }
};

/// −Σ p ln p over entries above `clamp`; entries in [−clamp, clamp] count as zero.
inline double entropy_from_probs(std::span<const double> probs, double clamp) {
  require(clamp >= 0.0, Errc::invalid_argument, "entropy_from_probs: clamp must be non-negative");
  double h = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p)) fail(Errc::invalid_argument, "entropy_from_probs: non-finite probability");
    if (p < -clamp) fail(Errc::negative_probability, "entropy_from_probs: negative probability " + std::to_string(p));
    if (p > clamp) h -= p * std::log(p);
  }
  return h;
}

struct ExactEntropy {
  double entropy = 0.0;
  SpectralModel spectrum;
};

/// Ground truth: full eigendecomposition of the densified matrix.
inline ExactEntropy exact_entropy(const SparseSymMatrix& r, std::size_t oracle_limit = kDefaultOracleLimit) {
  const std::size_t n = r.dim();
  require(n >= 1, Errc::empty_dimension, "exact_entropy: empty matrix");
  if (n > oracle_limit)
    fail(Errc::oracle_limit,
         "exact_entropy: n = " + std::to_string(n) + " exceeds oracle limit " + std::to_string(oracle_limit));
  EighOptions opts;
  opts.want_vectors = false;
  opts.size_limit = oracle_limit;
  auto eig = jacobi_eigh(to_dense(r), opts);
  const double floor = -1e-10 * static_cast<double>(n);
  ExactEntropy out;
  out.spectrum.probs.reserve(n);
  for (auto it = eig.values.rbegin(); it != eig.values.rend(); ++it) {
    double p = *it;
    if (p < floor) fail(Errc::not_psd, "exact_entropy: eigenvalue " + std::to_string(p) + " below PSD tolerance");
    out.spectrum.probs.push_back(std::max(p, 0.0));
  }
  out.entropy = entropy_from_probs(out.spectrum.probs, 1e-14);
  return out;
}

}  // namespace vne
