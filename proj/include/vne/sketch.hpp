#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vne/dense.hpp"
#include "vne/entropy.hpp"
#include "vne/error.hpp"
#include "vne/hutchinson.hpp"
#include "vne/parallel.hpp"
#include "vne/rng.hpp"
#include "vne/sparse.hpp"

namespace vne {

enum class ProjectionKind { gaussian, srht, countsketch, exact_debug };

inline const char* projection_name(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::gaussian: return "gaussian";
    case ProjectionKind::srht: return "srht";
    case ProjectionKind::countsketch: return "countsketch";
    case ProjectionKind::exact_debug: return "exact";
  }
  return "";
}

inline ProjectionKind parse_projection(const std::string& name) {
  if (name == "gaussian") return ProjectionKind::gaussian;
  if (name == "srht") return ProjectionKind::srht;
  if (name == "countsketch") return ProjectionKind::countsketch;
  if (name == "exact" || name == "exact_debug") return ProjectionKind::exact_debug;
  fail(Errc::invalid_argument, "projection must be gaussian, srht, countsketch or exact");
}

struct ProjectionSpec {
  ProjectionKind kind = ProjectionKind::countsketch;
  std::size_t s = 1;
  RngStream stream;
};

struct SketchSpectrum {
  std::vector<double> probs_tilde;  ///< descending
  double entropy_tilde = 0.0;
  ProjectionKind kind = ProjectionKind::countsketch;
  std::size_t s = 0;
};

/// x ← Hx with H the orthonormal Walsh–Hadamard matrix (Sylvester order).
inline void fwht_inplace(std::span<double> x) {
  const std::size_t len = x.size();
  if (len == 0 || !std::has_single_bit(len)) fail(Errc::invalid_argument, "fwht_inplace: length must be a power of two");
  for (std::size_t h = 1; h < len; h <<= 1) {
    for (std::size_t i = 0; i < len; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = x[j], b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(len));
  for (double& v : x) v *= scale;
}

/// Random ingredients of each projection. Drawing them separately from the
/// application lets tests materialize Π and compare against R·Π.
struct SrhtDraws {
  std::size_t padded = 0;          ///< n′, next power of two ≥ n
  std::vector<double> signs;       ///< D, length n′
  std::vector<std::size_t> picks;  ///< S: sampled Hadamard columns, length s
};

inline SrhtDraws srht_draws(std::size_t n, std::size_t s, const RngStream& stream) {
  require(n >= 1 && s >= 1, Errc::invalid_argument, "srht: n and s must be at least 1");
  SrhtDraws d;
  d.padded = std::bit_ceil(n);
  RngStream sign_stream = stream.child(0);
  d.signs = rademacher_vector(sign_stream, d.padded);
  RngStream pick_stream = stream.child(1);
  d.picks.resize(s);
  for (auto& p : d.picks) p = uniform_index(pick_stream, d.padded);
  return d;
}

struct CountSketchDraws {
  std::vector<std::size_t> bucket;  ///< target column of each input row of Π
  std::vector<double> signs;
};

inline CountSketchDraws countsketch_draws(std::size_t n, std::size_t s, const RngStream& stream) {
  require(n >= 1 && s >= 1, Errc::invalid_argument, "countsketch: n and s must be at least 1");
  CountSketchDraws d;
  RngStream bucket_stream = stream.child(0);
  d.bucket.resize(n);
  for (auto& b : d.bucket) b = uniform_index(bucket_stream, s);
  RngStream sign_stream = stream.child(1);
  d.signs = rademacher_vector(sign_stream, n);
  return d;
}

/// Column j of the Gaussian projection (before the 1/√s scaling).
inline std::vector<double> gaussian_projection_column(const RngStream& stream, std::size_t j, std::size_t n) {
  return probe_vector(stream, j, n);
}

/// R̃ = R·G/√s with G entrywise standard normal.
inline DenseMatrix apply_gaussian(const SparseSymMatrix& r, std::size_t s, const RngStream& stream,
                                  unsigned threads = 1) {
  require(s >= 1, Errc::invalid_argument, "apply_gaussian: s must be at least 1");
  const std::size_t n = r.dim();
  DenseMatrix out(n, s);
  const double scale = 1.0 / std::sqrt(static_cast<double>(s));
  parallel_for(s, threads, [&](std::size_t j) {
    std::vector<double> g = gaussian_projection_column(stream, j, n);
    for (double& v : g) v *= scale;
    const std::vector<double> y = r.matvec(g);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = y[i];
  });
  return out;
}

/// R̃ = R·Π with Π = √(n′/s)·D·H·S on the zero-padded dimension n′. Row i of
/// R·D·H is the FWHT of row i of R·D (H is symmetric); the s sampled entries
/// of that row form row i of R̃.
inline DenseMatrix apply_srht(const SparseSymMatrix& r, std::size_t s, const RngStream& stream, unsigned threads = 1) {
  require(s >= 1, Errc::invalid_argument, "apply_srht: s must be at least 1");
  const std::size_t n = r.dim();
  const SrhtDraws d = srht_draws(n, s, stream);
  const double scale = std::sqrt(static_cast<double>(d.padded) / static_cast<double>(s));
  DenseMatrix out(n, s);
  const auto off = r.row_offsets();
  const auto col = r.col_indices();
  const auto val = r.values();
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> buf(d.padded, 0.0);
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) buf[col[p]] = val[p] * d.signs[col[p]];
    fwht_inplace(buf);
    auto row = out.row(i);
    for (std::size_t j = 0; j < s; ++j) row[j] = scale * buf[d.picks[j]];
  });
  return out;
}

/// R̃ = R·D·S: every stored entry R(i,c) lands in column bucket[c] with sign D_c. O(nnz + n·s).
inline DenseMatrix apply_countsketch(const SparseSymMatrix& r, std::size_t s, const RngStream& stream,
                                     unsigned threads = 1) {
  require(s >= 1, Errc::invalid_argument, "apply_countsketch: s must be at least 1");
  const std::size_t n = r.dim();
  const CountSketchDraws d = countsketch_draws(n, s, stream);
  DenseMatrix out(n, s);
  const auto off = r.row_offsets();
  const auto col = r.col_indices();
  const auto val = r.values();
  parallel_for(n, threads, [&](std::size_t i) {
    auto row = out.row(i);
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) row[d.bucket[col[p]]] += val[p] * d.signs[col[p]];
  });
  return out;
}

/// Explicit Π (n×s, or n′×s for srht) built from the same draws as the apply_* routines.
inline DenseMatrix materialize_projection(ProjectionKind kind, std::size_t n, std::size_t s, const RngStream& stream) {
  switch (kind) {
    case ProjectionKind::gaussian: {
      DenseMatrix pi(n, s);
      const double scale = 1.0 / std::sqrt(static_cast<double>(s));
      for (std::size_t j = 0; j < s; ++j) {
        const auto g = gaussian_projection_column(stream, j, n);
        for (std::size_t i = 0; i < n; ++i) pi(i, j) = scale * g[i];
      }
      return pi;
    }
    case ProjectionKind::srht: {
      const SrhtDraws d = srht_draws(n, s, stream);
      const double scale = std::sqrt(static_cast<double>(d.padded) / static_cast<double>(s));
      const double h = 1.0 / std::sqrt(static_cast<double>(d.padded));
      DenseMatrix pi(d.padded, s);
      for (std::size_t i = 0; i < d.padded; ++i)
        for (std::size_t j = 0; j < s; ++j) {
          const bool odd = std::popcount(i & d.picks[j]) % 2 == 1;
          pi(i, j) = scale * d.signs[i] * (odd ? -h : h);
        }
      return pi;
    }
    case ProjectionKind::countsketch: {
      const CountSketchDraws d = countsketch_draws(n, s, stream);
      DenseMatrix pi(n, s);
      for (std::size_t i = 0; i < n; ++i) pi(i, d.bucket[i]) = d.signs[i];
      return pi;
    }
    case ProjectionKind::exact_debug:
      return DenseMatrix::identity(n);
  }
  return {};
}

/// Sketch sizes with constant `multiplier`, capped at n:
/// gaussian/srht ⌈(k + ⌈ln n⌉)·max(1, ⌈ln k⌉)/ε²⌉, countsketch ⌈k²/ε²⌉, exact n.
inline std::size_t default_s_sketch(ProjectionKind kind, std::size_t n, std::size_t k, double epsilon,
                                    double multiplier = 1.0) {
  require(n >= 1 && k >= 1, Errc::invalid_argument, "default_s_sketch: n and k must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(Errc::invalid_argument, "default_s_sketch: epsilon must lie in (0, 1)");
  if (!(multiplier > 0.0)) fail(Errc::invalid_argument, "default_s_sketch: multiplier must be positive");
  const double kd = static_cast<double>(k);
  double s = 0.0;
  switch (kind) {
    case ProjectionKind::gaussian:
    case ProjectionKind::srht: {
      const double log_n = static_cast<double>(ceil_count(std::log(static_cast<double>(n))));
      const double log_k = std::max(1.0, static_cast<double>(ceil_count(std::log(kd))));
      s = (kd + log_n) * log_k / (epsilon * epsilon);
      break;
    }
    case ProjectionKind::countsketch: s = kd * kd / (epsilon * epsilon); break;
    case ProjectionKind::exact_debug: return n;
  }
  return std::min(n, std::max<std::size_t>(1, ceil_count(multiplier * s)));
}

inline DenseMatrix apply_projection(const SparseSymMatrix& r, const ProjectionSpec& spec, unsigned threads = 1) {
  switch (spec.kind) {
    case ProjectionKind::gaussian: return apply_gaussian(r, spec.s, spec.stream, threads);
    case ProjectionKind::srht: return apply_srht(r, spec.s, spec.stream, threads);
    case ProjectionKind::countsketch: return apply_countsketch(r, spec.s, spec.stream, threads);
    case ProjectionKind::exact_debug: return to_dense(r);
  }
  return {};
}

/// Top-k singular values of R·Π as probabilities, and their entropy (clamp 1e-12).
/// rank(R) ≤ k is the caller's responsibility.
inline SketchSpectrum sketch_entropy(const SparseSymMatrix& r, std::size_t k, const ProjectionSpec& spec,
                                     unsigned threads = 1, std::size_t size_limit = kDefaultOracleLimit) {
  require(k >= 1, Errc::invalid_argument, "sketch_entropy: k must be at least 1");
  const std::size_t s = spec.kind == ProjectionKind::exact_debug ? r.dim() : spec.s;
  require(s >= 1, Errc::invalid_argument, "sketch_entropy: s must be at least 1");
  if (k > std::min(r.dim(), s)) fail(Errc::invalid_argument, "sketch_entropy: k exceeds min(n, s)");
  const DenseMatrix sketch = apply_projection(r, spec, threads);
  SketchSpectrum out;
  out.kind = spec.kind;
  out.s = s;
  out.probs_tilde = thin_singular_values(sketch, k, size_limit);
  out.entropy_tilde = entropy_from_probs(out.probs_tilde, 1e-12);
  return out;
}

}  // namespace vne
