#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "clockmps/kernels.hpp"
#include "clockmps/sparse.hpp"

namespace kernels = clockmps::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool have_avx2() { return kernels::detected_isa() == kernels::Isa::Avx2; }

}  // namespace

TEST(Kernels, ScalarReferenceValues) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_DOUBLE_EQ(kernels::scalar::dot(a, b), 32.0);
  std::vector<double> y{1, 1, 1};
  kernels::scalar::axpy(2.0, a, y);
  EXPECT_EQ(y, (std::vector<double>{3, 5, 7}));
  kernels::scalar::scale(0.5, y);
  EXPECT_EQ(y, (std::vector<double>{1.5, 2.5, 3.5}));
}

TEST(Kernels, SturmCountsOfPathLaplacian) {
  // diag (1,2,1), off-diagonal -1: eigenvalues 0, 1, 3.
  const std::vector<double> d{1, 2, 1}, e2{1, 1}, shifts{-0.5, 0.5, 2.0, 3.5};
  std::vector<std::int32_t> counts(4);
  kernels::scalar::sturm_counts(d, e2, shifts, 1e-300, counts);
  EXPECT_EQ(counts, (std::vector<std::int32_t>{0, 1, 2, 3}));
}

#if defined(__x86_64__)
class Avx2Equivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(Avx2Equivalence, DotAxpyScale) {
  if (!have_avx2()) GTEST_SKIP() << "CPU lacks AVX2";
  const std::size_t n = GetParam();
  const auto a = random_vector(n, 1), b = random_vector(n, 2);
  const double ref = kernels::scalar::dot(a, b);
  EXPECT_NEAR(kernels::avx2::dot(a, b), ref, 1e-13 * (1.0 + static_cast<double>(n)));
  auto y1 = random_vector(n, 3), y2 = y1;
  kernels::scalar::axpy(0.37, a, y1);
  kernels::avx2::axpy(0.37, a, y2);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15);
  kernels::scalar::scale(-1.25, y1);
  kernels::avx2::scale(-1.25, y2);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15);
}

TEST_P(Avx2Equivalence, CsrMatvec) {
  if (!have_avx2()) GTEST_SKIP() << "CPU lacks AVX2";
  const auto n = static_cast<std::int64_t>(GetParam());
  std::mt19937_64 rng(n);
  std::vector<clockmps::SparseMatrix<double>::Entry> entries;
  for (std::int64_t r = 0; r < n; ++r)
    for (int k = 0; k < static_cast<int>(rng() % 9); ++k)
      entries.push_back({r, static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n)), 0.5 - static_cast<double>(rng() % 1000) / 1000.0});
  const auto m = clockmps::SparseMatrix<double>::from_entries(n, n, entries);
  const auto x = random_vector(static_cast<std::size_t>(n), 4);
  std::vector<double> y1(static_cast<std::size_t>(n)), y2(static_cast<std::size_t>(n));
  kernels::scalar::csr_matvec(m.row_ptr(), m.col_idx(), m.values(), x, y1);
  kernels::avx2::csr_matvec(m.row_ptr(), m.col_idx(), m.values(), x, y2);
  for (std::size_t i = 0; i < y1.size(); ++i) EXPECT_NEAR(y1[i], y2[i], 1e-13);
}

TEST_P(Avx2Equivalence, SturmCounts) {
  if (!have_avx2()) GTEST_SKIP() << "CPU lacks AVX2";
  const std::size_t n = GetParam();
  const auto d = random_vector(n, 5);
  auto e = random_vector(n > 0 ? n - 1 : 0, 6);
  for (auto& x : e) x *= x;
  const auto shifts = random_vector(37, 7);
  std::vector<std::int32_t> c1(shifts.size()), c2(shifts.size());
  kernels::scalar::sturm_counts(d, e, shifts, 1e-300, c1);
  kernels::avx2::sturm_counts(d, e, shifts, 1e-300, c2);
  EXPECT_EQ(c1, c2);
}

INSTANTIATE_TEST_SUITE_P(Sizes, Avx2Equivalence, ::testing::Values(1, 3, 4, 7, 8, 31, 64, 1000, 4099));
#endif

TEST(Kernels, DispatchFollowsForcedIsa) {
  const auto before = kernels::active_isa();
  kernels::force_isa(kernels::Isa::Scalar);
  EXPECT_EQ(kernels::active_isa(), kernels::Isa::Scalar);
  const auto a = random_vector(100, 8), b = random_vector(100, 9);
  EXPECT_EQ(kernels::dot(a, b), kernels::scalar::dot(a, b));
  kernels::force_isa(kernels::Isa::Avx2);
  EXPECT_EQ(kernels::active_isa(), kernels::detected_isa());
  kernels::force_isa(before);
}
