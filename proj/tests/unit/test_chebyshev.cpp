#include <gtest/gtest.h>

#include <cmath>

#include "vne/chebyshev.hpp"
#include "vne/generators.hpp"

using vne::RngStream;

namespace {

double direct_sum(const vne::ChebCoefficients& c, double x) {
  const double y = std::clamp(2.0 / c.u * x - 1.0, -1.0, 1.0);
  double s = 0.0;
  for (std::size_t w = 0; w < c.alphas.size(); ++w) s += c.alphas[w] * std::cos(static_cast<double>(w) * std::acos(y));
  return s;
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

TEST(ChebAlpha, KnownValues) {
  EXPECT_NEAR(vne::cheb_alpha(1.0, 0), -0.1931471806, 1e-10);
  EXPECT_NEAR(vne::cheb_alpha(1.0, 1), 0.05685281944, 1e-10);
  EXPECT_NEAR(vne::cheb_alpha(1.0, 2), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(vne::cheb_alpha(1.0, 3), -1.0 / 24.0, 1e-15);
}

TEST(ChebScalar, KnownValues) {
  const auto c = vne::cheb_coefficients(1.0, 10);
  EXPECT_NEAR(vne::cheb_scalar_eval(c, 1.0), 4.300256045e-4, 1e-12);
  EXPECT_NEAR(vne::cheb_scalar_eval(c, 0.0), -1.0 / 220.0, 1e-15);
  EXPECT_NEAR(vne::cheb_scalar_eval(c, 0.25), -0.347376259833, 1e-11);
  EXPECT_THROW(vne::cheb_scalar_eval(c, 1.01), vne::Error);
  EXPECT_THROW(vne::cheb_scalar_eval(c, -0.01), vne::Error);
}

TEST(ChebScalar, ErrorWithinBound) {
  for (double u : {0.06, 0.5, 1.0})
    for (std::size_t m : {2u, 5u, 10u, 30u}) {
      const auto c = vne::cheb_coefficients(u, m);
      const double bound = u / (2.0 * static_cast<double>(m * (m + 1))) + 1e-12;
      for (int i = 0; i <= 1000; ++i) {
        const double x = u * i / 1000.0;
        EXPECT_LE(std::abs(xlogx(x) - vne::cheb_scalar_eval(c, x)), bound) << u << " " << m << " " << x;
      }
    }
}

TEST(ChebScalar, ClenshawMatchesDirectSum) {
  RngStream s(21, 0);
  for (int t = 0; t < 200; ++t) {
    const double u = 0.01 + 0.99 * s.next_uniform();
    const std::size_t m = 1 + vne::uniform_index(s, 40);
    const double x = u * s.next_uniform();
    const auto c = vne::cheb_coefficients(u, m);
    const double d = direct_sum(c, x);
    EXPECT_NEAR(vne::cheb_scalar_eval(c, x), d, 1e-10 * std::max(std::abs(d), 1e-3));
  }
}

TEST(ChebQuadraticForm, DiagonalMatchesScalar) {
  const std::vector<double> p{0.4, 0.3, 0.2, 0.1, 0.0};
  const auto r = vne::SparseSymMatrix::diagonal(p);
  RngStream s(3, 0);
  const auto g = vne::gaussian_vector(s, 5);
  for (std::size_t m : {1u, 2u, 7u, 25u}) {
    const auto c = vne::cheb_coefficients(0.6, m);
    double expected = 0.0;
    for (std::size_t j = 0; j < 5; ++j) expected += g[j] * g[j] * vne::clenshaw_sum(c, p[j]);
    EXPECT_NEAR(vne::cheb_quadratic_form(r, c, g), expected, 1e-10 * std::abs(expected));
  }
}

TEST(ChebQuadraticForm, RotatedMatchesEigenbasis) {
  const std::vector<double> p{0.5, 0.3, 0.2};
  const auto gm = vne::generate_from_spectrum(8, p, RngStream(4, 0));
  RngStream s(5, 0);
  const auto g = vne::gaussian_vector(s, 8);
  const auto c = vne::cheb_coefficients(1.0, 12);
  const auto& q = *gm.spectrum.basis;
  // gᵀf(R)g = Σ_j (q_jᵀg)² f(p_j) + (‖g‖² − Σ_j (q_jᵀg)²) f(0).
  double proj2 = 0.0, expected = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    double w = 0.0;
    for (std::size_t i = 0; i < 8; ++i) w += q(i, j) * g[i];
    proj2 += w * w;
    expected += w * w * vne::clenshaw_sum(c, p[j]);
  }
  expected += (vne::dot(g, g) - proj2) * vne::clenshaw_sum(c, 0.0);
  EXPECT_NEAR(vne::cheb_quadratic_form(gm.matrix, c, g), expected, 1e-10);
}

TEST(DefaultMCheb, Formula) {
  EXPECT_EQ(vne::default_m_cheb(1.0, 0.5, 0.5), 2u);
  EXPECT_EQ(vne::default_m_cheb(1.0, 0.02, 0.5), 50u);
  EXPECT_THROW(vne::default_m_cheb(0.1, 0.2, 0.5), vne::Error);
}

TEST(ChebyshevNte, HalfIdentityWithinBound) {
  const auto r = vne::SparseSymMatrix::diagonal(std::vector<double>{0.5, 0.5});
  vne::EstimatorConfig cfg;
  cfg.nte = true;
  cfg.m_override = 30;
  cfg.u_mode = vne::UMode::manual(1.0);
  const auto rep = vne::chebyshev_entropy(r, cfg);
  EXPECT_NEAR(rep.estimate, 0.693180575264, 1e-10);
  EXPECT_LE(std::abs(rep.estimate - std::log(2.0)), 2.0 * 1.0 / (2.0 * 30 * 30));
}

TEST(ChebyshevNte, CountsZeroEigenvalues) {
  const auto gm = vne::generate_low_rank_density(10, 2, vne::Decay::linear, RngStream(6, 0));
  vne::EstimatorConfig cfg;
  cfg.nte = true;
  cfg.m_override = 8;
  cfg.u_mode = vne::UMode::manual(1.0);
  const auto c = vne::cheb_coefficients(1.0, 8);
  const double expected =
      -(vne::clenshaw_sum(c, 2.0 / 3.0) + vne::clenshaw_sum(c, 1.0 / 3.0) + 8 * vne::clenshaw_sum(c, 0.0));
  EXPECT_NEAR(vne::chebyshev_entropy(gm.matrix, cfg, &gm.spectrum).estimate, expected, 1e-13);
}

TEST(ChebyshevEntropy, ProbeRunDeterministicAcrossThreads) {
  const auto g = vne::generate_tridiagonal_poisson(64);
  vne::EstimatorConfig cfg;
  cfg.m_override = 15;
  cfg.s_override = 40;
  cfg.seed = 3;
  const auto a = vne::chebyshev_entropy(g.matrix, cfg, &g.spectrum);
  cfg.threads = 3;
  const auto b = vne::chebyshev_entropy(g.matrix, cfg, &g.spectrum);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_TRUE(a.rel_err);
}

TEST(ChebyshevEntropy, WarnsOnLargeP1) {
  const auto r = vne::SparseSymMatrix::diagonal(std::vector<double>{0.95, 0.05});
  vne::EstimatorConfig cfg;
  cfg.nte = true;
  cfg.ell = 0.1;
  cfg.u_mode = vne::UMode::manual(1.0);
  const auto rep = vne::chebyshev_entropy(r, cfg);
  bool found = false;
  for (const auto& w : rep.warnings) found |= w.find("p1 > 1 - ell") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(ChebyshevNte, MatchesMatvecTrace) {
  // −Σ_j e_jᵀ f_m(R) e_j through the matrix recurrence equals the nte estimate.
  const std::vector<double> p{0.4, 0.25, 0.2, 0.1, 0.05};
  const auto gm = vne::generate_from_spectrum(9, p, RngStream(14, 0));
  vne::EstimatorConfig cfg;
  cfg.nte = true;
  cfg.m_override = 20;
  cfg.u_mode = vne::UMode::manual(0.7);
  const double nte = vne::chebyshev_entropy(gm.matrix, cfg, &gm.spectrum).estimate;
  const auto c = vne::cheb_coefficients(0.7, 20);
  double trace = 0.0;
  for (std::size_t j = 0; j < 9; ++j) {
    std::vector<double> e(9, 0.0);
    e[j] = 1.0;
    trace += vne::cheb_quadratic_form(gm.matrix, c, e);
  }
  EXPECT_NEAR(-trace, nte, 1e-10 * std::abs(nte));
}

TEST(ChebScalar, NegatedApproximationPositiveOnSpectrumRange) {
  for (double ell : {0.05, 0.1, 0.2})
    for (double eps : {0.5, 0.1}) {
      const std::size_t m = vne::default_m_cheb(1.0, ell, eps);
      const auto c = vne::cheb_coefficients(1.0, m);
      const double floor = (1.0 - eps) * ell * std::log(1.0 / (1.0 - ell));
      for (int i = 0; i <= 2000; ++i) {
        const double x = ell + (1.0 - 2.0 * ell) * i / 2000.0;
        EXPECT_GE(-vne::cheb_scalar_eval(c, x), floor) << ell << " " << eps << " " << x;
      }
    }
}
