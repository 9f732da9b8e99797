#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vne/entropy.hpp"
#include "vne/error.hpp"
#include "vne/hutchinson.hpp"
#include "vne/power.hpp"
#include "vne/report.hpp"
#include "vne/rng.hpp"
#include "vne/sparse.hpp"

namespace vne {

/// Substreams of RngStream(seed, 0) used by the estimators.
inline constexpr std::uint64_t kPowerStream = 1;
inline constexpr std::uint64_t kProbeStream = 2;
inline constexpr std::uint64_t kSketchStream = 3;

namespace detail {

/// Spectrum used by no-trace-estimation mode and by assumption checks.
struct SpectrumSource {
  SpectralModel owned;
  const SpectralModel* model = nullptr;
};

inline SpectrumSource resolve_spectrum(const SparseSymMatrix& r, const SpectralModel* known, bool need,
                                       std::size_t oracle_limit) {
  SpectrumSource src;
  if (known != nullptr && !known->empty()) {
    src.model = known;
  } else if (need) {
    src.owned = exact_entropy(r, oracle_limit).spectrum;
    src.model = &src.owned;
  }
  return src;
}

inline void add_assumption_warnings(EstimateReport& report, const AssumptionCheck& check) {
  if (check.u_ge_p1 == Tri::no) report.warnings.emplace_back("assumption violated: u < p1");
  if (check.ell_le_pmin == Tri::no) report.warnings.emplace_back("assumption violated: ell > p_min");
}

}  // namespace detail

/// m = ⌈(u/ℓ) ln(1/ε)⌉.
inline std::size_t default_m_taylor(double u, double ell, double epsilon) {
  if (!(ell > 0.0 && u <= 1.0 && u > 0.0)) fail(Errc::invalid_argument, "default_m_taylor: need 0 < ell and 0 < u <= 1");
  if (ell > u) fail(Errc::invalid_argument, "default_m_taylor: ell exceeds u");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(Errc::invalid_argument, "default_m_taylor: epsilon must lie in (0, 1)");
  return std::max<std::size_t>(1, ceil_count(u / ell * std::log(1.0 / epsilon)));
}

/// Σ_{k=1}^{m} p(1 − p/u)^k / k: the per-eigenvalue value of the truncated series.
inline double taylor_scalar_series(double p, double u, std::size_t m) {
  const double c = 1.0 - p / u;
  double power = 1.0, sum = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    power *= c;
    sum += power / static_cast<double>(k);
  }
  return p * sum;
}

/// Terms gᵀR·Cᵏ·g / k, k = 1..m, with C = I − R/u. One R-matvec per term:
/// z = R·w_{k−1} advances w_k = w_{k−1} − z/u, and because R is symmetric
/// gᵀR·w_k = (Rg)ᵀw_k where Rg is the first z.
inline std::vector<double> taylor_series_terms(const SparseSymMatrix& r, double u, std::size_t m,
                                               std::span<const double> g) {
  if (!(u > 0.0)) fail(Errc::invalid_argument, "taylor_quadratic_form: u must be positive");
  const std::size_t n = r.dim();
  if (g.size() != n) fail(Errc::dimension_mismatch, "taylor_quadratic_form: probe length differs from n");
  std::vector<double> terms;
  if (m == 0) return terms;
  terms.reserve(m);
  const double inv_u = 1.0 / u;
  std::vector<double> w(g.begin(), g.end());
  std::vector<double> z(n);
  std::vector<double> rg(n);
  for (std::size_t k = 1; k <= m; ++k) {
    r.matvec(w, z);
    if (k == 1) rg = z;
    for (std::size_t i = 0; i < n; ++i) w[i] -= inv_u * z[i];
    terms.push_back(dot(rg, w) / static_cast<double>(k));
  }
  return terms;
}

inline double taylor_quadratic_form(const SparseSymMatrix& r, double u, std::size_t m, std::span<const double> g) {
  double sum = 0.0;
  for (double t : taylor_series_terms(r, u, m, g)) sum += t;
  return sum;
}

/// g ↦ Σ_k gᵀRCᵏg/k as a trace-estimation oracle.
class TaylorOracle {
 public:
  TaylorOracle(const SparseSymMatrix& r, double u, std::size_t m) : r_(&r), u_(u), m_(m) {}
  std::size_t dimension() const { return r_->dim(); }
  double operator()(std::span<const double> g) const { return taylor_quadratic_form(*r_, u_, m_, g); }

 private:
  const SparseSymMatrix* r_;
  double u_;
  std::size_t m_;
};

/// Taylor-series entropy estimate ln(1/u) + (1/s)Σᵢ Σₖ gᵢᵀRCᵏgᵢ/k.
/// `known` (optional) supplies the exact spectrum for nte mode, exact/rel_err
/// and assumption checks; without it nte mode falls back to the dense oracle.
inline EstimateReport taylor_entropy(const SparseSymMatrix& r, const EstimatorConfig& cfg,
                                     const SpectralModel* known = nullptr) {
  cfg.validate();
  const Stopwatch clock;
  const std::size_t n = r.dim();
  require(n >= 1, Errc::empty_dimension, "taylor_entropy: empty matrix");
  const RngStream root(cfg.seed, 0);

  EstimateReport report;
  report.method = "taylor";
  report.n = n;
  report.nnz = r.nnz();
  report.seed = cfg.seed;
  report.nte = cfg.nte;

  const UpperBound ub = estimate_u(r, cfg.delta, cfg.u_mode, root.child(kPowerStream), cfg.threads);
  const double u = ub.u;
  report.u_used = u;
  if (ub.power) report.p1_tilde = ub.power->p1_tilde;
  if (ub.heuristic) report.warnings.emplace_back("u from raw power estimate is heuristic");

  std::size_t m = 0;
  if (cfg.m_override) {
    m = *cfg.m_override;
  } else {
    if (!cfg.ell) fail(Errc::invalid_argument, "taylor_entropy: ell is required unless m is given");
    m = default_m_taylor(u, *cfg.ell, cfg.epsilon);
  }
  report.m_used = m;

  const auto spectrum = detail::resolve_spectrum(r, known, cfg.nte, cfg.oracle_limit);
  if (cfg.nte) {
    double series = 0.0;
    for (double p : spectrum.model->probs) series += taylor_scalar_series(p, u, m);
    report.estimate = std::log(1.0 / u) + series;
  } else {
    const std::size_t s = cfg.s_override ? *cfg.s_override : default_s(cfg.epsilon, cfg.delta);
    report.s_used = s;
    report.estimate = std::log(1.0 / u) + estimate_trace(TaylorOracle(r, u, m), s, root.child(kProbeStream), cfg.threads);
  }

  if (spectrum.model != nullptr) {
    detail::add_assumption_warnings(report,
                                    check_assumptions(spectrum.model, {u, cfg.ell, std::nullopt, n}));
    attach_exact(report, entropy_from_probs(spectrum.model->probs, 1e-14));
  }
  report.wall_ms = clock.elapsed_ms();
  return report;
}

}  // namespace vne
