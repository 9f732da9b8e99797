#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vne/dense.hpp"
#include "vne/entropy.hpp"
#include "vne/error.hpp"
#include "vne/power.hpp"

namespace vne {

struct EstimatorConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  std::optional<double> ell;  ///< lower bound on every p_i; needed unless m is overridden
  UMode u_mode = UMode::six_times_power();
  std::optional<std::size_t> m_override;
  std::optional<std::size_t> s_override;
  bool nte = false;  ///< exact trace of the truncated polynomial instead of probes
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t oracle_limit = kDefaultOracleLimit;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) fail(Errc::invalid_argument, "epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) fail(Errc::invalid_argument, "delta must lie in (0, 1)");
    if (ell && !(*ell > 0.0 && *ell <= 1.0)) fail(Errc::invalid_argument, "ell must lie in (0, 1]");
    if (m_override && *m_override < 1) fail(Errc::invalid_argument, "m override must be at least 1");
    if (s_override && *s_override < 1 && !nte) fail(Errc::invalid_argument, "s override must be at least 1");
  }
};

struct EstimateReport {
  std::string method;
  double estimate = 0.0;
  std::size_t n = 0;
  std::size_t nnz = 0;
  std::optional<std::size_t> m_used;
  std::optional<std::size_t> s_used;
  std::optional<double> u_used;
  std::optional<double> p1_tilde;
  bool nte = false;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> exact;
  std::optional<double> rel_err;
  std::optional<double> abs_err;  ///< set instead of rel_err when the exact entropy is 0
  std::vector<std::string> warnings;
};

enum class Tri { unknown, yes, no };

inline const char* tri_name(Tri t) {
  switch (t) {
    case Tri::yes: return "true";
    case Tri::no: return "false";
    case Tri::unknown: return "unknown";
  }
  return "unknown";
}

struct AssumptionCheck {
  Tri u_ge_p1 = Tri::unknown;
  Tri ell_le_pmin = Tri::unknown;
  Tri rank_le_k = Tri::unknown;
};

struct AssumptionInputs {
  std::optional<double> u;
  std::optional<double> ell;
  std::optional<std::size_t> k;
  std::size_t n = 0;  ///< matrix dimension; 0 means "probs lists every eigenvalue"
};

/// Compares theorem preconditions against a known spectrum; every state stays
/// unknown without one. Comparisons allow a relative 1e-12 for rounding.
inline AssumptionCheck check_assumptions(const SpectralModel* model, const AssumptionInputs& in) {
  AssumptionCheck out;
  if (model == nullptr || model->empty()) return out;
  const double p1 = model->p_max();
  const std::size_t n = in.n == 0 ? model->probs.size() : in.n;
  const double pmin = model->p_min(n);
  if (in.u) out.u_ge_p1 = *in.u >= p1 * (1.0 - 1e-12) ? Tri::yes : Tri::no;
  if (in.ell) out.ell_le_pmin = *in.ell <= pmin * (1.0 + 1e-12) ? Tri::yes : Tri::no;
  if (in.k) {
    std::size_t rank = 0;
    for (double p : model->probs)
      if (p > 1e-10) ++rank;
    out.rank_le_k = rank <= *in.k ? Tri::yes : Tri::no;
  }
  return out;
}

inline double relative_error(double estimate, double exact) {
  if (!(exact > 0.0)) fail(Errc::invalid_argument, "relative_error: exact value must be positive");
  return std::abs(estimate - exact) / exact;
}

/// Fills exact / rel_err (or abs_err for a pure state) on a report.
inline void attach_exact(EstimateReport& report, double exact) {
  report.exact = exact;
  if (exact > 0.0) {
    report.rel_err = relative_error(report.estimate, exact);
  } else {
    report.abs_err = std::abs(report.estimate - exact);
    report.warnings.emplace_back("exact entropy is 0 (pure state): absolute error reported");
  }
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace vne
