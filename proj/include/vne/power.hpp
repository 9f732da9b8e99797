#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vne/error.hpp"
#include "vne/parallel.hpp"
#include "vne/rng.hpp"
#include "vne/sparse.hpp"

namespace vne {

struct PowerEstimate {
  double p1_tilde = 0.0;
  std::size_t iterations = 0;   ///< t
  std::size_t repetitions = 0;  ///< q
};

struct PowerParams {
  std::size_t iterations = 1;   ///< t = ⌈ln √(4n)⌉
  std::size_t repetitions = 1;  ///< q = ⌈4.82 ln(1/δ)⌉
};

inline PowerParams default_power_params(std::size_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) fail(Errc::invalid_argument, "default_power_params: delta must lie in (0, 1)");
  require(n >= 1, Errc::empty_dimension, "default_power_params: n must be at least 1");
  PowerParams p;
  p.repetitions = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(4.82 * std::log(1.0 / delta))));
  p.iterations =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(std::sqrt(4.0 * static_cast<double>(n))))));
  return p;
}

/// Max over q Rademacher-started trials of the Rayleigh quotient after t
/// products with R. Trial j draws from stream.child(j).
inline PowerEstimate power_method(const SparseSymMatrix& r, std::size_t t, std::size_t q, const RngStream& stream,
                                  unsigned threads = 1) {
  require(t >= 1 && q >= 1, Errc::invalid_argument, "power_method: t and q must be at least 1");
  const std::size_t n = r.dim();
  require(n >= 1, Errc::empty_dimension, "power_method: empty matrix");
  std::vector<double> candidates(q, 0.0);
  parallel_for(q, threads, [&](std::size_t j) {
    RngStream trial = stream.child(j);
    std::vector<double> x = rademacher_vector(trial, n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < t; ++i) {
      r.matvec(x, y);
      // Rescaling leaves the Rayleigh quotient unchanged and keeps x_t representable.
      const double norm = std::sqrt(dot(y, y));
      if (!(norm > 1e-300)) return;
      for (std::size_t k = 0; k < n; ++k) x[k] = y[k] / norm;
    }
    r.matvec(x, y);
    candidates[j] = dot(x, y) / dot(x, x);
  });
  return {*std::max_element(candidates.begin(), candidates.end()), t, q};
}

/// How the spectral upper bound u is chosen.
struct UMode {
  enum class Kind { six_times_power, power_raw, manual };
  Kind kind = Kind::six_times_power;
  double value = 1.0;  ///< used by manual

  static UMode six_times_power() { return {Kind::six_times_power, 1.0}; }
  static UMode power_raw() { return {Kind::power_raw, 1.0}; }
  static UMode manual(double u) {
    if (!(u > 0.0 && u <= 1.0)) fail(Errc::invalid_argument, "u-mode manual: value must lie in (0, 1]");
    return {Kind::manual, u};
  }

  /// "six", "raw" or "manual:<v>".
  static UMode parse(const std::string& text) {
    if (text == "six") return six_times_power();
    if (text == "raw") return power_raw();
    if (text.rfind("manual:", 0) == 0) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text.substr(7), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size() - 7) fail(Errc::invalid_argument, "u-mode: malformed manual value");
      return manual(v);
    }
    fail(Errc::invalid_argument, "u-mode must be six, raw or manual:<v>");
  }

  std::string name() const {
    switch (kind) {
      case Kind::six_times_power: return "six";
      case Kind::power_raw: return "raw";
      case Kind::manual: return "manual";
    }
    return "";
  }
};

inline double u_from_p1(double p1_tilde, const UMode& mode) {
  switch (mode.kind) {
    case UMode::Kind::six_times_power: return std::min(1.0, 6.0 * p1_tilde);
    case UMode::Kind::power_raw: return std::min(1.0, p1_tilde);
    case UMode::Kind::manual: return mode.value;
  }
  return 1.0;
}

struct UpperBound {
  double u = 1.0;
  std::optional<PowerEstimate> power;  ///< absent in manual mode
  bool heuristic = false;              ///< power_raw carries no per-run guarantee
};

inline UpperBound estimate_u(const SparseSymMatrix& r, double delta, const UMode& mode, const RngStream& stream,
                             unsigned threads = 1) {
  if (mode.kind == UMode::Kind::manual) {
    if (!(mode.value > 0.0 && mode.value <= 1.0)) fail(Errc::invalid_argument, "estimate_u: manual u must lie in (0, 1]");
    return {mode.value, std::nullopt, false};
  }
  const PowerParams params = default_power_params(r.dim(), delta);
  const PowerEstimate est = power_method(r, params.iterations, params.repetitions, stream, threads);
  UpperBound out{u_from_p1(est.p1_tilde, mode), est, mode.kind == UMode::Kind::power_raw};
  if (!(out.u > 0.0)) fail(Errc::not_psd, "estimate_u: power method returned a non-positive eigenvalue estimate");
  return out;
}

}  // namespace vne
