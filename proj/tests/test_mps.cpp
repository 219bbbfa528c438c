#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "clockmps/clock_hamiltonian.hpp"
#include "clockmps/errors.hpp"
#include "clockmps/mps.hpp"
#include "test_circuits.hpp"

using namespace clockmps;

namespace {

Vector<double> random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector<double> v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v.normalized();
}

}  // namespace

TEST(Mps, ProductStateHasBondOne) {
  const std::vector<Index> dims{2, 3, 2};
  const std::vector<Index> cfg{1, 2, 0};
  const auto p = product_state<double>(dims, cfg);
  EXPECT_EQ(p.max_bond(), 1);
  const auto v = to_dense(p);
  ASSERT_EQ(v.size(), 12);
  EXPECT_EQ(v[1 * 6 + 2 * 2 + 0], 1.0);
  EXPECT_NEAR(v.norm(), 1.0, 0.0);
}

TEST(Mps, BellStateBondTwo) {
  Vector<double> bell = Vector<double>::Zero(4);
  bell[0] = bell[3] = 1 / std::sqrt(2.0);
  const std::vector<Index> dims{2, 2};
  const auto m = mps_from_dense(bell, dims);
  EXPECT_EQ(m.internal_bond_dims(), std::vector<Index>{2});
  EXPECT_NEAR(entanglement_entropies(m)[0], 1.0, 1e-12);
  EXPECT_LT((to_dense(m) - bell).norm(), 1e-14);
}

TEST(Mps, GhzCompressedToProductHasHalfFidelity) {
  const std::vector<Index> dims{2, 2, 2, 2};
  Vector<double> ghz = Vector<double>::Zero(16);
  ghz[0] = ghz[15] = 1 / std::sqrt(2.0);
  const auto m = mps_from_dense(ghz, dims);
  EXPECT_EQ(m.max_bond(), 2);
  const auto c = compress(m, Truncation{1, 0.0, 1e-12});
  EXPECT_EQ(c.mps.max_bond(), 1);
  EXPECT_NEAR(c.fidelity, 0.5, 1e-12);
  EXPECT_NEAR(fidelity(m, c.mps), 0.5, 1e-12);
}

TEST(Mps, DenseRoundTripAndCanonicalForms) {
  const std::vector<Index> dims{3, 2, 2, 2, 2};
  const auto v = random_vector(48, 5);
  auto m = mps_from_dense(v, dims);
  EXPECT_EQ(m.canonical_form().kind, CanonicalKind::Left);
  EXPECT_LT(canonical_defect(m), 1e-12);
  EXPECT_LT((to_dense(m) - v).norm(), 1e-12);
  EXPECT_EQ(m.bond_dims(), (std::vector<Index>{1, 3, 6, 4, 2, 1}));

  right_canonicalize(m);
  EXPECT_EQ(m.canonical_form().kind, CanonicalKind::Right);
  EXPECT_LT(canonical_defect(m), 1e-12);
  EXPECT_LT((to_dense(m) - v).norm(), 1e-12);

  mixed_canonicalize(m, 2);
  EXPECT_EQ(m.canonical_form(), (CanonicalForm{CanonicalKind::Mixed, 2}));
  EXPECT_EQ(canonical_form_name(m.canonical_form()), "mixed(2)");
  EXPECT_LT(canonical_defect(m), 1e-12);
  EXPECT_LT(isometry_defect(m, 0, true), 1e-12);
  EXPECT_LT(isometry_defect(m, 4, false), 1e-12);
  EXPECT_LT((to_dense(m) - v).norm(), 1e-12);
}

TEST(Mps, RandomMpsIsNormalizedRightCanonical) {
  const std::vector<Index> dims{2, 2, 2, 2, 2, 2};
  const auto m = random_mps<double>(dims, 3, 42);
  EXPECT_EQ(m.max_bond(), 3);
  EXPECT_EQ(m.bond_dims().front(), 1);
  EXPECT_EQ(m.bond_dims()[1], 2);
  EXPECT_NEAR(norm(m), 1.0, 1e-12);
  EXPECT_LT(canonical_defect(m), 1e-12);
  const auto again = random_mps<double>(dims, 3, 42);
  EXPECT_EQ(to_dense(m), to_dense(again));
}

TEST(Mps, InconsistentShapesRejected) {
  std::vector<std::vector<Matrix<double>>> sites(2);
  sites[0] = {Matrix<double>::Ones(1, 2), Matrix<double>::Ones(1, 2)};
  sites[1] = {Matrix<double>::Ones(3, 1), Matrix<double>::Ones(3, 1)};
  EXPECT_THROW((Mps<double>(sites)), std::invalid_argument);
}

TEST(Mps, OverlapAndExpectationMatchDense) {
  const ClockHamiltonian h(samples::or_verifier());
  const auto mpo = hamiltonian_to_mpo<double>(h);
  const auto dims = mpo.phys_dims();
  const auto a = random_mps<double>(dims, 4, 1);
  const auto b = random_mps<double>(dims, 5, 2);
  const auto va = to_dense(a), vb = to_dense(b);
  EXPECT_NEAR(overlap(a, b), va.dot(vb), 1e-12);
  const auto hm = h.assemble<double>();
  EXPECT_NEAR(expectation(a, mpo), va.dot(hm * va), 1e-10);
  EXPECT_LT((apply(mpo, va) - hm * va).norm(), 1e-10);
}

TEST(Mps, ComplexOverlapConjugatesBra) {
  const std::vector<Index> dims{2};
  std::vector<std::vector<Matrix<Complex>>> s(1);
  s[0] = {Matrix<Complex>::Constant(1, 1, Complex(0, 1)), Matrix<Complex>::Zero(1, 1)};
  const Mps<Complex> m(s);
  EXPECT_NEAR(std::abs(overlap(m, m) - Complex(1, 0)), 0.0, 1e-15);
}

TEST(Mps, NotHistoryStateFrozen) {
  const auto st = build_history_state(samples::not_circuit(), BitString::from_string("0"), 0);
  const auto m = history_state_as_mps<double>(st, 1);
  EXPECT_EQ(m.internal_bond_dims(), std::vector<Index>{2});
  Eigen::Vector4d expected(1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0));
  EXPECT_LT((to_dense(m) - expected).cwiseAbs().maxCoeff(), 1e-15);
  const std::vector<std::size_t> q{1};
  const Readout r = read_assignment(m, q);
  EXPECT_EQ(r.bits.to_string(), "0");
  EXPECT_NEAR(r.probability, 1.0, 1e-12);
  EXPECT_NEAR(r.condition_weight, 0.5, 1e-12);
  EXPECT_FALSE(r.ambiguous);
}

TEST(Mps, HistoryMpsBondsBoundedByClockAndEntropies) {
  const auto c = samples::or_verifier();
  for (const char* in : {"01", "10", "11"}) {
    const auto st = build_history_state(c, BitString::from_string(in), 0);
    const auto m = history_state_as_mps<double>(st, c.num_wires());
    EXPECT_LE(m.max_bond(), static_cast<Index>(c.num_gates() + 1));
    EXPECT_LT((to_dense(m) - history_vector<double>(st, c.num_wires())).norm(), 1e-12);
    const auto ent = entanglement_entropies(m);
    const auto bonds = m.internal_bond_dims();
    for (std::size_t i = 0; i < ent.size(); ++i)
      EXPECT_LE(ent[i], std::log2(static_cast<double>(bonds[i])) + 1e-12);
    const std::vector<std::size_t> inputs{2, 3};
    const Readout r = read_assignment(m, inputs);
    EXPECT_EQ(r.bits.to_string(), in);
  }
}

TEST(Mps, TruncationRule) {
  Matrix<double> m = Matrix<double>::Zero(3, 3);
  m(0, 0) = 3;
  m(1, 1) = 2;
  m(2, 2) = 1e-14;
  const auto s = truncated_svd(m, Truncation{});
  EXPECT_EQ(s.s.size(), 2);
  const auto t = truncated_svd(m, Truncation{0, 4.0 / 13.0 + 1e-12, 1e-12});
  EXPECT_EQ(t.s.size(), 1);
  EXPECT_NEAR(t.discarded_weight, 4.0 / 13.0, 1e-12);
  const auto b = truncated_svd(m, Truncation{1, 0.0, 0.0});
  EXPECT_EQ(b.s.size(), 1);
}

TEST(Mps, DenseBudget) {
  const std::vector<Index> dims(30, 2);
  EXPECT_THROW(checked_dimension(dims, 1u << 20), BudgetError);
}

TEST(Mpo, CompressionPreservesOperator) {
  const ClockHamiltonian h(samples::and_circuit());
  const auto raw = hamiltonian_to_mpo<double>(h, MpoBuildOptions{false, 0.0});
  const auto c = compress_mpo(raw);
  EXPECT_LE(c.max_bond(), raw.max_bond());
  EXPECT_LT((to_dense(c) - to_dense(raw)).cwiseAbs().maxCoeff(), 1e-10);
}
