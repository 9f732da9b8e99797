#include <gtest/gtest.h>

#include <cmath>

#include "vne/generators.hpp"
#include "vne/power.hpp"
#include "vne/sparse.hpp"

using vne::RngStream;

TEST(PowerParams, Defaults) {
  const auto p = vne::default_power_params(4, 0.1);
  EXPECT_EQ(p.repetitions, 12u);
  EXPECT_EQ(p.iterations, 2u);  // ⌈ln 4⌉
  EXPECT_EQ(vne::default_power_params(1000000, 0.1).iterations, 8u);
  EXPECT_EQ(vne::default_power_params(10, 0.5).repetitions, 4u);
  EXPECT_EQ(vne::default_power_params(1, 0.5).iterations, 1u);
  EXPECT_THROW(vne::default_power_params(4, 0.0), vne::Error);
  EXPECT_THROW(vne::default_power_params(4, 1.0), vne::Error);
}

TEST(PowerMethod, DiagonalExampleIsExact) {
  const auto r = vne::SparseSymMatrix::diagonal(std::vector<double>{0.5, 0.3, 0.2});
  const auto est = vne::power_method(r, 50, 5, RngStream(1, 0));
  EXPECT_NEAR(est.p1_tilde, 0.5, 1e-9);
  EXPECT_EQ(est.iterations, 50u);
  EXPECT_EQ(est.repetitions, 5u);
}

TEST(PowerMethod, MaximallyMixed) {
  const auto r = vne::SparseSymMatrix::diagonal(std::vector<double>(8, 0.125));
  EXPECT_NEAR(vne::power_method(r, 3, 4, RngStream(2, 0)).p1_tilde, 0.125, 1e-15);
}

TEST(PowerMethod, RayleighBoundOnRotatedMatrix) {
  const std::vector<double> p{0.5, 0.3, 0.2};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = vne::generate_from_spectrum(16, p, RngStream(seed, 7));
    const auto params = vne::default_power_params(16, 0.1);
    const auto est = vne::power_method(g.matrix, params.iterations, params.repetitions, RngStream(seed, 0));
    EXPECT_LE(est.p1_tilde, 0.5 * (1.0 + 1e-12));
    EXPECT_GE(est.p1_tilde, 0.5 / 6.0);
  }
}

TEST(PowerMethod, DeterministicAcrossThreads) {
  const auto g = vne::generate_tridiagonal_poisson(200);
  const auto a = vne::power_method(g.matrix, 4, 12, RngStream(9, 0), 1);
  const auto b = vne::power_method(g.matrix, 4, 12, RngStream(9, 0), 4);
  EXPECT_EQ(a.p1_tilde, b.p1_tilde);
}

TEST(PowerMethod, ZeroMatrixGivesZero) {
  const auto r = vne::SparseSymMatrix::diagonal(std::vector<double>(3, 0.0));
  EXPECT_EQ(vne::power_method(r, 2, 2, RngStream(0, 0)).p1_tilde, 0.0);
}

TEST(UMode, Parse) {
  EXPECT_EQ(vne::UMode::parse("six").kind, vne::UMode::Kind::six_times_power);
  EXPECT_EQ(vne::UMode::parse("raw").kind, vne::UMode::Kind::power_raw);
  const auto m = vne::UMode::parse("manual:0.25");
  EXPECT_EQ(m.kind, vne::UMode::Kind::manual);
  EXPECT_EQ(m.value, 0.25);
  EXPECT_THROW(vne::UMode::parse("manual:"), vne::Error);
  EXPECT_THROW(vne::UMode::parse("manual:0.2x"), vne::Error);
  EXPECT_THROW(vne::UMode::parse("manual:1.5"), vne::Error);
  EXPECT_THROW(vne::UMode::parse("seven"), vne::Error);
}

TEST(UFromP1, CappedAtOne) {
  EXPECT_DOUBLE_EQ(vne::u_from_p1(0.1, vne::UMode::six_times_power()), 0.6);
  EXPECT_EQ(vne::u_from_p1(0.5, vne::UMode::six_times_power()), 1.0);
  EXPECT_EQ(vne::u_from_p1(0.3, vne::UMode::power_raw()), 0.3);
  EXPECT_EQ(vne::u_from_p1(0.3, vne::UMode::manual(0.9)), 0.9);
}

TEST(EstimateU, Modes) {
  const auto r = vne::SparseSymMatrix::diagonal(std::vector<double>{0.5, 0.3, 0.2});
  const auto manual = vne::estimate_u(r, 0.1, vne::UMode::manual(0.7), RngStream(0, 1));
  EXPECT_EQ(manual.u, 0.7);
  EXPECT_FALSE(manual.power);
  const auto raw = vne::estimate_u(r, 0.1, vne::UMode::power_raw(), RngStream(0, 1));
  EXPECT_TRUE(raw.heuristic);
  EXPECT_LE(raw.u, 0.5 + 1e-12);
  const auto six = vne::estimate_u(r, 0.1, vne::UMode::six_times_power(), RngStream(0, 1));
  EXPECT_FALSE(six.heuristic);
  EXPECT_GE(six.u, 0.5);
  EXPECT_LE(six.u, 1.0);
}

TEST(EstimateU, SixModeCoversP1WhenLowerBoundHolds) {
  const std::vector<double> p{0.5, 0.3, 0.2};
  const auto g = vne::generate_from_spectrum(10, p, RngStream(3, 3));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ub = vne::estimate_u(g.matrix, 0.1, vne::UMode::six_times_power(), RngStream(seed, 0));
    ASSERT_TRUE(ub.power);
    EXPECT_LE(ub.power->p1_tilde, 0.5 * (1.0 + 1e-12));
    if (ub.power->p1_tilde >= 0.5 / 6.0) EXPECT_GE(ub.u, 0.5);
  }
}
