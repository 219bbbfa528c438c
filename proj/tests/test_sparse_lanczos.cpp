#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "clockmps/lanczos.hpp"
#include "clockmps/sparse.hpp"
#include "clockmps/tridiagonal.hpp"

using namespace clockmps;

namespace {

SparseMatrix<double> random_symmetric(std::int64_t n, int per_row, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<SparseMatrix<double>::Entry> e;
  for (std::int64_t r = 0; r < n; ++r) {
    e.push_back({r, r, g(rng)});
    for (int k = 0; k < per_row; ++k) {
      const auto c = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n));
      const double v = g(rng);
      e.push_back({r, c, v});
      e.push_back({c, r, v});
    }
  }
  return SparseMatrix<double>::from_entries(n, n, e);
}

}  // namespace

TEST(Sparse, DuplicatesSummedAndZerosDropped) {
  const auto m = SparseMatrix<double>::from_entries(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, 0.0}, {1, 1, -1.0}});
  EXPECT_EQ(m.nonzeros(), 2);
  EXPECT_DOUBLE_EQ(m.coeff(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(m.coeff(1, 0), 0.0);
  const auto rows = SparseMatrix<double>::from_rows(2, 2, [](std::int64_t r, auto& out) {
    out.push_back({1 - r, 1.0});
    out.push_back({1 - r, 1.0});
  });
  EXPECT_DOUBLE_EQ(rows.coeff(0, 1), 2.0);
  EXPECT_EQ(rows.hermiticity_defect(), 0.0);
}

TEST(Sparse, MatvecMatchesDense) {
  const auto m = random_symmetric(50, 3, 1);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(50, -1.0, 1.0);
  EXPECT_LT((m * x - m.to_dense() * x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(m.hermiticity_defect(), 1e-15);
  EXPECT_GE(m.norm_bound(), Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.to_dense()).eigenvalues().cwiseAbs().maxCoeff());
}

TEST(Lanczos, LowestPairsMatchDense) {
  const auto m = random_symmetric(300, 4, 2);
  LanczosOptions o;
  o.tol = 1e-11;
  const auto res = lanczos_lowest(m, 5, o);
  ASSERT_TRUE(res.converged);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.to_dense()).eigenvalues();
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(res.pairs[i].value, ev[i], 1e-9);
    const Eigen::VectorXd r = m * res.pairs[i].vector - res.pairs[i].value * res.pairs[i].vector;
    EXPECT_LE(r.norm(), 1e-10 * m.norm_bound() * 10);
  }
}

TEST(Lanczos, DegenerateEigenvaluesReturnedWithMultiplicity) {
  // diag(0, 0, 0, 1, 2, ...): triple ground state.
  std::vector<SparseMatrix<double>::Entry> e;
  for (std::int64_t i = 0; i < 40; ++i) e.push_back({i, i, i < 3 ? 0.0 : static_cast<double>(i - 2)});
  e.push_back({3, 4, 0.1});
  e.push_back({4, 3, 0.1});
  const auto m = SparseMatrix<double>::from_entries(40, 40, e);
  const auto res = lanczos_lowest(m, 4, LanczosOptions{});
  ASSERT_EQ(res.pairs.size(), 4u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(res.pairs[i].value, 0.0, 1e-10);
  EXPECT_GT(res.pairs[3].value, 0.5);
}

TEST(Lanczos, DeterministicForFixedSeed) {
  const auto m = random_symmetric(120, 3, 3);
  const auto a = lanczos_lowest(m, 2, LanczosOptions{});
  const auto b = lanczos_lowest(m, 2, LanczosOptions{});
  EXPECT_EQ(a.pairs[0].value, b.pairs[0].value);
  EXPECT_EQ(a.matvecs, b.matvecs);
}

TEST(Lanczos, ComplexHermitian) {
  const int n = 60;
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Random(n, n);
  d = (d + d.adjoint()).eval();
  std::vector<SparseMatrix<Complex>::Entry> e;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e.push_back({i, j, d(i, j)});
  const auto m = SparseMatrix<Complex>::from_entries(n, n, e);
  const auto res = lanczos_lowest(m, 2, LanczosOptions{});
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(d).eigenvalues();
  EXPECT_NEAR(res.pairs[0].value, ev[0], 1e-9);
  EXPECT_NEAR(res.pairs[1].value, ev[1], 1e-9);
}

TEST(Tridiagonal, EigenvaluesAndVectorsMatchDense) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  SymTridiagonal t;
  for (int i = 0; i < 80; ++i) t.diag.push_back(g(rng));
  for (int i = 0; i < 79; ++i) t.offdiag.push_back(g(rng));
  const auto ev = tridiagonal_eigenvalues(t);
  const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t.to_dense()).eigenvalues();
  for (int i = 0; i < 80; ++i) EXPECT_NEAR(ev[static_cast<std::size_t>(i)], ref[i], 1e-12);
  const Eigen::MatrixXd v = tridiagonal_eigenvectors(t, ev);
  const Eigen::MatrixXd a = t.to_dense();
  for (int i = 0; i < 80; ++i) EXPECT_LT((a * v.col(i) - ev[static_cast<std::size_t>(i)] * v.col(i)).norm(), 1e-10);
  EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(80, 80)).cwiseAbs().maxCoeff(), 1e-10);
  const auto mid = tridiagonal_eigenvalues(t, 10, 5);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(mid[static_cast<std::size_t>(i)], ev[static_cast<std::size_t>(10 + i)]);
}
