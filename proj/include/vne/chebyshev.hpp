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
#include "vne/sparse.hpp"
#include "vne/taylor.hpp"

namespace vne {

/// Coefficients of f_m(x) = Σ_{w=0}^{m} α_w T_w((2/u)x − 1), the Chebyshev
/// approximation of x ln x on [0, u].
struct ChebCoefficients {
  double u = 1.0;
  std::vector<double> alphas;

  std::size_t degree() const noexcept { return alphas.empty() ? 0 : alphas.size() - 1; }
};

inline double cheb_alpha(double u, std::size_t w) {
  if (w == 0) return u / 2.0 * (std::log(u / 4.0) + 1.0);
  if (w == 1) return u / 4.0 * (2.0 * std::log(u / 4.0) + 3.0);
  const double wd = static_cast<double>(w);
  return (w % 2 == 0 ? u : -u) / (wd * wd * wd - wd);
}

inline ChebCoefficients cheb_coefficients(double u, std::size_t m) {
  if (!(u > 0.0 && u <= 1.0)) fail(Errc::invalid_argument, "cheb_coefficients: u must lie in (0, 1]");
  require(m >= 1, Errc::invalid_argument, "cheb_coefficients: m must be at least 1");
  ChebCoefficients c{u, std::vector<double>(m + 1)};
  for (std::size_t w = 0; w <= m; ++w) c.alphas[w] = cheb_alpha(u, w);
  return c;
}

/// Clenshaw on the shifted argument, no domain check; ½(α₀ + b₀ − b₂) equals the full Σ α_w T_w.
inline double clenshaw_sum(const ChebCoefficients& c, double x) {
  const double y = 2.0 / c.u * x - 1.0;
  double b1 = 0.0, b2 = 0.0, b0 = 0.0;
  for (std::size_t k = c.alphas.size(); k-- > 0;) {
    b0 = c.alphas[k] + 2.0 * y * b1 - b2;
    if (k > 0) {
      b2 = b1;
      b1 = b0;
    }
  }
  // After the k = 0 step: b0 = b_0, b1 = b_1, b2 = b_2.
  return 0.5 * (c.alphas[0] + b0 - b2);
}

inline double cheb_scalar_eval(const ChebCoefficients& c, double x) {
  if (!(x >= 0.0 && x <= c.u)) fail(Errc::domain, "cheb_scalar_eval: x outside [0, u]");
  return clenshaw_sum(c, x);
}

/// gᵀf_m(R)g by the matrix Clenshaw recurrence
/// y_k = α_k g + (4/u)R y_{k+1} − 2y_{k+1} − y_{k+2}, using three rotating work vectors.
inline double cheb_quadratic_form(const SparseSymMatrix& r, const ChebCoefficients& c, std::span<const double> g) {
  const std::size_t n = r.dim();
  if (g.size() != n) fail(Errc::dimension_mismatch, "cheb_quadratic_form: probe length differs from n");
  require(!c.alphas.empty(), Errc::invalid_argument, "cheb_quadratic_form: empty coefficients");
  const double scale = 4.0 / c.u;
  std::vector<double> y0(n, 0.0), y1(n, 0.0), y2(n, 0.0);  // y_k, y_{k+1}, y_{k+2}
  const std::size_t m = c.degree();
  for (std::size_t k = m + 1; k-- > 0;) {
    const double alpha = c.alphas[k];
    if (k == m) {
      for (std::size_t i = 0; i < n; ++i) y0[i] = alpha * g[i];
    } else {
      r.matvec(y1, y0);
      for (std::size_t i = 0; i < n; ++i) y0[i] = alpha * g[i] + scale * y0[i] - 2.0 * y1[i] - y2[i];
    }
    if (k > 0) {
      std::swap(y2, y1);  // y2 <- y_{k+1}
      std::swap(y1, y0);  // y1 <- y_k; y0 is scratch
    }
  }
  // After k = 0: y0 = y_0, y1 = y_1, y2 = y_2.
  double gg = 0.0, gy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    gg += g[i] * g[i];
    gy += g[i] * (y0[i] - y2[i]);
  }
  return 0.5 * (c.alphas[0] * gg + gy);
}

/// m = ⌈√(u / (2εℓ ln(1/(1−ℓ))))⌉.
inline std::size_t default_m_cheb(double u, double ell, double epsilon) {
  if (!(ell > 0.0 && ell < 1.0)) fail(Errc::invalid_argument, "default_m_cheb: ell must lie in (0, 1)");
  if (!(u > 0.0 && u <= 1.0)) fail(Errc::invalid_argument, "default_m_cheb: u must lie in (0, 1]");
  if (ell > u) fail(Errc::invalid_argument, "default_m_cheb: ell exceeds u");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(Errc::invalid_argument, "default_m_cheb: epsilon must lie in (0, 1)");
  const double log_term = -std::log1p(-ell);
  return std::max<std::size_t>(1, ceil_count(std::sqrt(u / (2.0 * epsilon * ell * log_term))));
}

class ChebyshevOracle {
 public:
  ChebyshevOracle(const SparseSymMatrix& r, const ChebCoefficients& c) : r_(&r), c_(&c) {}
  std::size_t dimension() const { return r_->dim(); }
  /// −gᵀf_m(R)g, the PSD side of the estimator.
  double operator()(std::span<const double> g) const { return -cheb_quadratic_form(*r_, *c_, g); }

 private:
  const SparseSymMatrix* r_;
  const ChebCoefficients* c_;
};

/// Chebyshev entropy estimate −(1/s)Σᵢ gᵢᵀf_m(R)gᵢ. In nte mode the trace is
/// −Σⱼ f_m(pⱼ) over all n eigenvalues, zeros included.
inline EstimateReport chebyshev_entropy(const SparseSymMatrix& r, const EstimatorConfig& cfg,
                                        const SpectralModel* known = nullptr) {
  cfg.validate();
  const Stopwatch clock;
  const std::size_t n = r.dim();
  require(n >= 1, Errc::empty_dimension, "chebyshev_entropy: empty matrix");
  const RngStream root(cfg.seed, 0);

  EstimateReport report;
  report.method = "chebyshev";
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
    if (!cfg.ell) fail(Errc::invalid_argument, "chebyshev_entropy: ell is required unless m is given");
    m = default_m_cheb(u, *cfg.ell, cfg.epsilon);
  }
  report.m_used = m;
  const ChebCoefficients coeffs = cheb_coefficients(u, m);

  const auto spectrum = detail::resolve_spectrum(r, known, cfg.nte, cfg.oracle_limit);
  if (cfg.nte) {
    const auto& probs = spectrum.model->probs;
    double trace = 0.0;
    for (double p : probs) trace += clenshaw_sum(coeffs, p);
    if (probs.size() < n) trace += static_cast<double>(n - probs.size()) * clenshaw_sum(coeffs, 0.0);
    report.estimate = -trace;
  } else {
    const std::size_t s = cfg.s_override ? *cfg.s_override : default_s(cfg.epsilon, cfg.delta);
    report.s_used = s;
    report.estimate = estimate_trace(ChebyshevOracle(r, coeffs), s, root.child(kProbeStream), cfg.threads);
  }

  if (spectrum.model != nullptr) {
    detail::add_assumption_warnings(report, check_assumptions(spectrum.model, {u, cfg.ell, std::nullopt, n}));
    if (cfg.ell && spectrum.model->p_max() > 1.0 - *cfg.ell)
      report.warnings.emplace_back("assumption violated: p1 > 1 - ell");
    attach_exact(report, entropy_from_probs(spectrum.model->probs, 1e-14));
  }
  report.wall_ms = clock.elapsed_ms();
  return report;
}

}  // namespace vne
