#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "vne/error.hpp"
#include "vne/parallel.hpp"
#include "vne/rng.hpp"

namespace vne {

/// An implicit PSD operator A, seen only through g ↦ gᵀAg. Evaluation must be
/// const and safe to call concurrently.
template <typename O>
concept QuadraticFormOracle = requires(const O& oracle, std::span<const double> g) {
  { oracle.dimension() } -> std::convertible_to<std::size_t>;
  { oracle(g) } -> std::convertible_to<double>;
};

/// Probe i is drawn from stream.child(i); exposed so independent routes can replay the probes.
inline std::vector<double> probe_vector(const RngStream& stream, std::size_t i, std::size_t n) {
  RngStream probe = stream.child(i);
  return gaussian_vector(probe, n);
}

/// gᵢᵀAgᵢ for i = 0..s-1, each slot owned by one probe.
template <QuadraticFormOracle Oracle>
std::vector<double> probe_quadratic_forms(const Oracle& oracle, std::size_t s, const RngStream& stream,
                                          unsigned threads = 1) {
  std::vector<double> forms(s);
  const std::size_t n = oracle.dimension();
  parallel_for(s, threads, [&](std::size_t i) {
    const std::vector<double> g = probe_vector(stream, i, n);
    forms[i] = oracle(g);
  });
  return forms;
}

/// (1/s)·Σ gᵢᵀAgᵢ over s Gaussian probes, reduced in probe order.
template <QuadraticFormOracle Oracle>
double estimate_trace(const Oracle& oracle, std::size_t s, const RngStream& stream, unsigned threads = 1) {
  require(s >= 1, Errc::invalid_argument, "estimate_trace: s must be at least 1");
  const std::vector<double> forms = probe_quadratic_forms(oracle, s, stream, threads);
  double sum = 0.0;
  for (double f : forms) sum += f;
  return sum / static_cast<double>(s);
}

/// ⌈x⌉, except that values within a relative 1e-9 of an integer snap to it,
/// so formula values that are integers on paper do not round up on rounding noise.
inline std::size_t ceil_count(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(x));
}

/// s = ⌈20 ln(2/δ) / ε²⌉.
inline std::size_t default_s(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(Errc::invalid_argument, "default_s: epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) fail(Errc::invalid_argument, "default_s: delta must lie in (0, 1)");
  return ceil_count(20.0 * std::log(2.0 / delta) / (epsilon * epsilon));
}

}  // namespace vne
