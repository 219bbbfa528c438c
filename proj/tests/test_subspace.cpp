#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "clockmps/subspace.hpp"

using namespace clockmps;

TEST(Subspace, TridiagonalEntries) {
  const SubspaceHamiltonian h(PenaltyProfile::canonical(3, 1, 1));
  Eigen::MatrixXd expected(4, 4);
  expected << 1 + 3, -1, 0, 0,
              -1, 2, -1, 0,
              0, -1, 2, -1,
              0, 0, -1, 1 + 1;
  EXPECT_EQ(h.dense(), expected);
  EXPECT_THROW(PenaltyProfile::canonical(0, 0, 0), std::invalid_argument);
  EXPECT_THROW(PenaltyProfile::canonical(2, 0, 2), std::invalid_argument);
  PenaltyProfile bad = PenaltyProfile::canonical(2, 0, 0);
  bad.diag_penalties[1] = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Subspace, FrozenSmallSpectra) {
  // T=1, no penalty: {0, 2}. T=1, final penalty: (3 -+ sqrt 5)/2.
  const auto a = AnalyticSpectrum(1, SpectrumCase::A0B0);
  EXPECT_NEAR(a.eigenvalue(0), 0.0, 1e-15);
  EXPECT_NEAR(a.eigenvalue(1), 2.0, 1e-15);
  const auto b = AnalyticSpectrum(1, SpectrumCase::A0B1);
  EXPECT_NEAR(b.eigenvalue(0), 0.3819660112501051, 1e-15);
  EXPECT_NEAR(b.eigenvalue(1), 2.618033988749895, 1e-15);
  // Uniform ground state of the bare path.
  const Eigen::VectorXd v0 = AnalyticSpectrum(4, SpectrumCase::A0B0).eigenvector(0);
  EXPECT_LT((v0 - Eigen::VectorXd::Constant(5, 1.0 / std::sqrt(5.0))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Subspace, AnalyticMatchesNumeric) {
  for (std::size_t T : {1, 3, 17, 64})
    for (auto which : {SpectrumCase::A0B0, SpectrumCase::A0B1}) {
      const AnalyticSpectrum a(T, which);
      const auto num = numeric_spectrum(SubspaceHamiltonian(PenaltyProfile::canonical(T, 0, which == SpectrumCase::A0B1)));
      for (std::size_t n = 0; n <= T; ++n) {
        EXPECT_NEAR(a.eigenvalue(n), num.eigenvalues[n], 1e-10);
        EXPECT_NEAR(std::abs(a.eigenvector(n).dot(num.eigenvectors.col(static_cast<Eigen::Index>(n)))), 1.0, 1e-10);
        EXPECT_NEAR(a.eigenvector(n).norm(), 1.0, 1e-12);
      }
    }
}

TEST(Subspace, GapLemmaTightTwoByTwo) {
  Eigen::MatrixXd P(2, 2), Q(2, 2);
  P << 0, 0, 0, 1;
  Q << 0.5, -0.5, -0.5, 0.5;
  const auto r = gap_lemma_bound(P, Q);
  EXPECT_NEAR(r.bound, 0.29289321881345254, 1e-14);
  EXPECT_NEAR(r.theta, std::numbers::pi / 4, 1e-14);
  EXPECT_EQ(r.null_dim_p, 1);
  EXPECT_NEAR(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(P + Q).eigenvalues()[0], r.bound, 1e-14);
}

TEST(Subspace, GapLemmaRejectsBadInput) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd P(2, 2);
  P << 0, 0, 0, 1;
  EXPECT_THROW(gap_lemma_bound(I, P), std::invalid_argument);   // trivial null space
  EXPECT_THROW(gap_lemma_bound(-P, P), std::invalid_argument);  // not PSD
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 0, 1;
  EXPECT_THROW(gap_lemma_bound(asym, P), std::invalid_argument);
}

TEST(Subspace, A1BoundFrozenAndDominated) {
  EXPECT_NEAR(a1_gap_bound(1), 1.0 - std::sqrt(0.5), 1e-15);
  for (std::size_t T : {1, 2, 3, 10, 50, 200}) {
    const PenaltyProfile p = PenaltyProfile::canonical(T, 1, 0);
    const double ground = numeric_eigenvalues(SubspaceHamiltonian(p), 0, 1)[0];
    EXPECT_LE(a1_gap_bound(T), ground);
    const auto [L, D] = clock_split(p);
    const double lemma = gap_lemma_bound(L, D).bound;
    EXPECT_LE(lemma, ground + 1e-12);
    if (T <= 2) EXPECT_NEAR(lemma, a1_gap_bound(T), 1e-12);
  }
}

TEST(Subspace, ReportFields) {
  const auto r = subspace_report(5, 0, 1);
  EXPECT_EQ(r.analytic.size(), 6u);
  ASSERT_TRUE(r.max_abs_err.has_value());
  EXPECT_LT(*r.max_abs_err, 1e-12);
  ASSERT_TRUE(r.bound.has_value());
  EXPECT_LE(*r.bound, r.numeric[0]);
  const auto p = subspace_report(5, 2, 0);
  EXPECT_TRUE(p.analytic.empty());
  EXPECT_FALSE(p.max_abs_err.has_value());
  EXPECT_FALSE(subspace_report(5, 0, 0).bound.has_value());
}
