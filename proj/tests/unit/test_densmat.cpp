#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "vne/dense.hpp"
#include "vne/entropy.hpp"
#include "vne/generators.hpp"
#include "vne/io.hpp"
#include "vne/rng.hpp"
#include "vne/sparse.hpp"

using vne::RngStream;
using vne::SparseSymMatrix;

namespace {

SparseSymMatrix random_symmetric(std::size_t n, std::uint64_t seed, double density) {
  RngStream s(seed, 0);
  std::vector<vne::Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      if (s.next_uniform() > density) continue;
      const double v = s.next_uniform() * 2.0 - 1.0;
      t.push_back({i, j, v});
      if (i != j) t.push_back({j, i, v});
    }
  return SparseSymMatrix::from_triplets(n, std::move(t));
}

void expect_density_invariants(const vne::GeneratedMatrix& g) {
  EXPECT_NEAR(g.matrix.trace(), 1.0, 1e-10);
  const auto exact = vne::exact_entropy(g.matrix);
  for (double p : exact.spectrum.probs) EXPECT_GE(p, -1e-10 * static_cast<double>(g.matrix.dim()));
}

}  // namespace

TEST(Matvec, Identity) {
  const std::vector<double> ones(3, 1.0);
  const auto id = SparseSymMatrix::diagonal(ones);
  EXPECT_EQ(id.matvec(std::vector<double>{1, 2, 3}), (std::vector<double>{1, 2, 3}));
}

TEST(Matvec, ZeroMatrix) {
  const SparseSymMatrix zero = SparseSymMatrix::from_triplets(4, {});
  EXPECT_EQ(zero.matvec(std::vector<double>{1, 2, 3, 4}), std::vector<double>(4, 0.0));
}

TEST(Matvec, MatchesDenseMultiply) {
  const auto r = random_symmetric(16, 17, 0.4);
  const auto d = vne::to_dense(r);
  RngStream s(1, 1);
  const auto x = vne::gaussian_vector(s, 16);
  const auto y = r.matvec(x);
  for (std::size_t i = 0; i < 16; ++i) {
    double ref = 0.0;
    for (std::size_t j = 0; j < 16; ++j) ref += d(i, j) * x[j];
    EXPECT_NEAR(y[i], ref, 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Matvec, DimensionMismatch) {
  const auto r = random_symmetric(5, 1, 0.5);
  EXPECT_THROW(r.matvec(std::vector<double>(4, 1.0)), vne::Error);
}

TEST(SparseSymMatrix, RejectsAsymmetry) {
  EXPECT_THROW(SparseSymMatrix::from_triplets(2, {{0, 1, 1.0}}), vne::Error);
  EXPECT_THROW(SparseSymMatrix::from_triplets(2, {{0, 1, 1.0}, {1, 0, 2.0}}), vne::Error);
  EXPECT_THROW(SparseSymMatrix::from_triplets(2, {{0, 0, 1.0}, {0, 0, 1.0}}), vne::Error);
  EXPECT_THROW(SparseSymMatrix(2, {0, 1, 1}, {0}, {std::nan("")}), vne::Error);
  EXPECT_THROW(SparseSymMatrix(2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), vne::Error);  // unsorted row
}

TEST(HaarLike, TraceAndPsd) {
  for (std::size_t n : {1u, 5u, 32u}) expect_density_invariants(vne::generate_haar_like_density(n, RngStream(n, 0)));
}

TEST(HaarLike, EntropyBelowMaximalMixing) {
  const auto g = vne::generate_haar_like_density(64, RngStream(64, 0));
  const double h = vne::entropy_from_probs(g.spectrum.probs, 1e-14);
  const double exact = vne::exact_entropy(g.matrix).entropy;
  EXPECT_NEAR(h, exact, 1e-10);
  // GGᵀ/trace follows a Marchenko–Pastur-like law: entropy ln n − O(1).
  EXPECT_LT(h, std::log(64.0));
  EXPECT_GT(h, std::log(64.0) - 1.0);
}

TEST(HaarLike, SkipsSpectrumBeyondOracleLimit) {
  const auto g = vne::generate_haar_like_density(8, RngStream(0, 0), 4);
  EXPECT_TRUE(g.spectrum.empty());
}

TEST(TridiagonalPoisson, ClosedFormSpectrum) {
  const auto g = vne::generate_tridiagonal_poisson(8);
  double sum = 0.0;
  for (double p : g.spectrum.probs) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-10);
  EXPECT_NEAR(g.spectrum.probs.front(), 0.242461577598, 1e-11);
  EXPECT_NEAR(vne::entropy_from_probs(g.spectrum.probs, 1e-14), 1.82041052242, 1e-10);
  EXPECT_NEAR(g.matrix.trace(), 1.0, 1e-10);
  EXPECT_EQ(g.matrix.nnz(), 3u * 8u - 2u);
}

TEST(TridiagonalPoisson, OracleMatchesClosedForm) {
  const auto g = vne::generate_tridiagonal_poisson(64);
  const auto exact = vne::exact_entropy(g.matrix);
  ASSERT_EQ(exact.spectrum.probs.size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(exact.spectrum.probs[i], g.spectrum.probs[i], 1e-8);
}

TEST(TridiagonalPoisson, RejectsTinyN) { EXPECT_THROW(vne::generate_tridiagonal_poisson(1), vne::Error); }

TEST(LowRank, LinearDecayProbabilities) {
  const auto g = vne::generate_low_rank_density(16, 4, vne::Decay::linear, RngStream(1, 0));
  const std::vector<double> want{0.4, 0.3, 0.2, 0.1};
  ASSERT_EQ(g.spectrum.probs.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(g.spectrum.probs[i], want[i], 1e-15);
  g.spectrum.validate();
}

TEST(LowRank, ExponentialDecayProbabilities) {
  const auto g = vne::generate_low_rank_density(10, 3, vne::Decay::exponential, RngStream(2, 0));
  EXPECT_NEAR(g.spectrum.probs[0], 0.66524096, 1e-8);
  EXPECT_NEAR(g.spectrum.probs[1], 0.24472847, 1e-8);
  EXPECT_NEAR(g.spectrum.probs[2], 0.090030573, 1e-8);
}

TEST(LowRank, RankAndInvariants) {
  const auto g = vne::generate_low_rank_density(24, 5, vne::Decay::linear, RngStream(3, 0));
  expect_density_invariants(g);
  const auto exact = vne::exact_entropy(g.matrix);
  for (std::size_t i = 5; i < 24; ++i) EXPECT_LT(exact.spectrum.probs[i], 1e-10);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(exact.spectrum.probs[i], g.spectrum.probs[i], 1e-12);
}

TEST(LowRank, RejectsBadRank) {
  EXPECT_THROW(vne::generate_low_rank_density(4, 0, vne::Decay::linear, RngStream()), vne::Error);
  EXPECT_THROW(vne::generate_low_rank_density(4, 5, vne::Decay::linear, RngStream()), vne::Error);
}

TEST(LinearPlusUniform, Probabilities) {
  const auto g = vne::generate_linear_plus_uniform(6, 2, RngStream(4, 0));
  const std::vector<double> want{2.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7, 1.0 / 7};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(g.spectrum.probs[i], want[i], 1e-15);
  EXPECT_NEAR(g.spectrum.p_min(6), 1.0 / 7, 1e-15);
  expect_density_invariants(g);
  EXPECT_THROW(vne::generate_linear_plus_uniform(3, 4, RngStream()), vne::Error);
}

TEST(LinearPlusUniform, FullLinearMatchesLowRank) {
  const auto a = vne::generate_linear_plus_uniform(7, 7, RngStream(5, 0));
  const auto b = vne::generate_low_rank_density(7, 7, vne::Decay::linear, RngStream(5, 0));
  EXPECT_EQ(a.spectrum.probs, b.spectrum.probs);
  EXPECT_EQ(a.matrix, b.matrix);
}

TEST(Generators, DeterministicGivenSeed) {
  EXPECT_EQ(vne::generate_haar_like_density(12, RngStream(7, 0)).matrix,
            vne::generate_haar_like_density(12, RngStream(7, 0)).matrix);
  EXPECT_EQ(vne::generate_low_rank_density(12, 3, vne::Decay::exponential, RngStream(7, 0)).matrix,
            vne::generate_low_rank_density(12, 3, vne::Decay::exponential, RngStream(7, 0)).matrix);
}

TEST(MatrixMarket, RoundTripIsBitExact) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto g = vne::generate_low_rank_density(9, 3, vne::Decay::exponential, RngStream(seed, 0));
    std::stringstream ss;
    vne::write_matrix_market(g.matrix, ss);
    EXPECT_EQ(vne::read_matrix_market(ss), g.matrix);
  }
  const auto p = vne::generate_tridiagonal_poisson(11).matrix;
  std::stringstream ss;
  vne::write_matrix_market(p, ss);
  EXPECT_EQ(vne::read_matrix_market(ss), p);
}

TEST(MatrixMarket, OneBasedIndicesAndLowerTriangle) {
  std::stringstream ss(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 4\n1 1 0.5\n2 1 0.25\n2 2 0.5\n3 3 1e-3\n");
  const auto r = vne::read_matrix_market(ss);
  EXPECT_EQ(r.dim(), 3u);
  EXPECT_EQ(r.nnz(), 5u);
  EXPECT_EQ(r.at(0, 1), 0.25);
  EXPECT_EQ(r.at(1, 0), 0.25);
  EXPECT_EQ(r.at(2, 2), 1e-3);
}

TEST(MatrixMarket, GeneralSymmetryMustBeSymmetric) {
  std::stringstream ok("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 3\n2 1 3\n");
  EXPECT_EQ(vne::read_matrix_market(ok).at(0, 1), 3.0);
  std::stringstream bad("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 3\n2 1 4\n");
  try {
    vne::read_matrix_market(bad);
    FAIL() << "asymmetric general file accepted";
  } catch (const vne::Error& e) {
    EXPECT_EQ(e.code(), vne::Errc::parse);
    EXPECT_NE(std::string(e.what()).find("asymmetric"), std::string::npos);
  }
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    std::stringstream ss(text);
    try {
      vne::read_matrix_market(ss);
    } catch (const vne::Error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("%%MatrixMarket matrix array real symmetric\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(message("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n1 1 x\n").find("line 4"),
            std::string::npos);
  EXPECT_NE(message("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n1 1 2.0\n").find("duplicate"),
            std::string::npos);
  EXPECT_NE(message("%%MatrixMarket matrix coordinate real symmetric\n2 3 0\n").find("square"), std::string::npos);
}

TEST(Spectrum, SidecarRoundTrip) {
  const auto g = vne::generate_tridiagonal_poisson(13);
  std::stringstream ss;
  vne::write_spectrum(g.spectrum.probs, ss);
  EXPECT_EQ(vne::read_spectrum(ss), g.spectrum.probs);
}
