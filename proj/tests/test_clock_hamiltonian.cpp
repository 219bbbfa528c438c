#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "clockmps/clock_hamiltonian.hpp"
#include "clockmps/errors.hpp"
#include "clockmps/spectral.hpp"
#include "test_circuits.hpp"

using namespace clockmps;
using samples::not_circuit;
using samples::or_verifier;

TEST(ClockHamiltonian, NotCircuitExplicitMatrix) {
  const ClockHamiltonian h(not_circuit());
  EXPECT_EQ(h.dim(), 4u);
  const auto m = h.assemble<double>();
  EXPECT_EQ(m.nonzeros(), 8);
  // index t*2 + x
  Eigen::MatrixXd expected(4, 4);
  expected << 1, 0, 0, -1,
              0, 1, -1, 0,
              0, -1, 2, 0,
              -1, 0, 0, 1;
  EXPECT_EQ(m.to_dense(), expected);
}

TEST(ClockHamiltonian, TermsListed) {
  const ClockHamiltonian h(or_verifier());
  ASSERT_EQ(h.terms().size(), 1u + 6u + 1u);
  EXPECT_EQ(h.terms().front().kind, TermKind::Init);
  EXPECT_EQ(h.terms().front().weight, 6.0);
  EXPECT_EQ(h.terms().back().kind, TermKind::Final);
  EXPECT_EQ(h.terms().back().t, 6u);
  EXPECT_EQ(term_kind_name(TermKind::Evol), "EVOL");
}

TEST(ClockHamiltonian, SumOfTermsIsTheAssembly) {
  const ClockHamiltonian h(samples::and_circuit());
  const auto full = h.assemble<double>().to_dense();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(full.rows(), full.cols());
  for (const auto& t : h.terms()) sum += h.assemble_term<double>(t).to_dense();
  EXPECT_LT((full - sum).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(h.assemble<double>().hermiticity_defect(), 0.0);
}

TEST(ClockHamiltonian, ComplexAssemblyForQuantumGates) {
  const ReversibleCircuit d = decompose_toffoli(ReversibleCircuit(3, {1, 2}, 0, {Gate::toffoli(1, 2, 0)}));
  const ClockHamiltonian h(d);
  EXPECT_FALSE(h.is_real());
  EXPECT_THROW(h.assemble<double>(), std::invalid_argument);
  const auto m = h.assemble<Complex>();
  EXPECT_LT(m.hermiticity_defect(), 1e-14);
}

TEST(ClockHamiltonian, BudgetRefusal) {
  const ClockHamiltonian h(build_factoring_verifier({15, 3}));
  EXPECT_THROW(h.assemble<double>(), BudgetError);
}

TEST(ClockHamiltonian, HistoryStatesAreEigenvectors) {
  for (const auto& c : {not_circuit(), or_verifier(), samples::and_circuit()}) {
    const ClockHamiltonian h(c);
    const auto m = h.assemble<double>();
    const std::size_t k = c.input_wires().size();
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a)
      for (std::size_t n = 0; n <= c.num_gates(); ++n) {
        const HistoryState st = build_history_state(c, BitString::from_index(a, k), n);
        const Vector<double> v = history_vector<double>(st, c.num_wires());
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
        EXPECT_LE((m * v - st.eigenvalue * v).norm(), 1e-9);
        if (st.B == 0) EXPECT_NEAR(term_expectation(h, h.terms().back(), v), 0.0, 1e-12);
      }
  }
}

TEST(ClockHamiltonian, NotHistoryStateFrozen) {
  const HistoryState st = build_history_state(not_circuit(), BitString::from_string("0"), 0);
  EXPECT_EQ(st.A, 0);
  EXPECT_EQ(st.B, 0);
  EXPECT_EQ(st.eigenvalue, 0.0);
  const Vector<double> v = history_vector<double>(st, 1);
  Eigen::Vector4d expected(1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0));
  EXPECT_LT((v - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ClockHamiltonian, PenalizedInputsRejectedUnlessAllowed) {
  const auto c = or_verifier();
  EXPECT_THROW(build_history_state(c, BitString::from_string("101"), 0), std::invalid_argument);
  const HistoryState st = build_history_state(c, BitString::from_string("101"), 0, true);
  EXPECT_EQ(st.A, 1);
  const ClockHamiltonian h(c);
  const Vector<double> v = history_vector<double>(st, 3);
  EXPECT_LE((h.assemble<double>() * v - st.eigenvalue * v).norm(), 1e-9);
}

TEST(ClockHamiltonian, BlocksAreClosed) {
  const ClockHamiltonian h(samples::random_classical(4, 2, 7, 11));
  for (std::uint64_t x = 0; x < 16; ++x) EXPECT_EQ(block_leakage(h, BitString::from_index(x, 4)), 0.0);
}

TEST(ClockHamiltonian, MpoMatchesSparse) {
  for (const auto& c : {not_circuit(), or_verifier(), samples::and_circuit(), samples::random_classical(5, 2, 9, 3)}) {
    const ClockHamiltonian h(c);
    const auto mpo = hamiltonian_to_mpo<double>(h);
    EXPECT_TRUE(mpo.hermitian());
    EXPECT_EQ(mpo.num_sites(), static_cast<std::size_t>(c.num_wires()) + 1);
    EXPECT_LT((to_dense(mpo) - h.assemble<double>().to_dense()).cwiseAbs().maxCoeff(), 1e-10);
    const auto raw = hamiltonian_to_mpo<double>(h, MpoBuildOptions{false, 0.0});
    EXPECT_LT((to_dense(raw) - h.assemble<double>().to_dense()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(mpo.max_bond(), raw.max_bond());
  }
  const ReversibleCircuit d = decompose_toffoli(ReversibleCircuit(3, {1, 2}, 0, {Gate::toffoli(1, 2, 0)}));
  const ClockHamiltonian hd(d);
  EXPECT_LT((to_dense(hamiltonian_to_mpo<Complex>(hd)) - hd.assemble<Complex>().to_dense()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ClockHamiltonian, SectorMatchesFullSpectrumBottom) {
  const ClockHamiltonian h(or_verifier());
  const auto seeds = valid_input_seeds(h);
  EXPECT_EQ(seeds.size(), 4u);
  const auto sector = assemble_sector<double>(h, seeds);
  EXPECT_EQ(sector.basis.size(), 4u * 7u);
  const auto full = full_spectrum(h);
  const Eigen::VectorXd sev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sector.matrix.to_dense()).eigenvalues();
  // Ground set lives in the sector.
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(sev[i], full.eigenvalues[static_cast<std::size_t>(i)], 1e-12);
  const Vector<double> e = sector.embed(Vector<double>::Ones(28), h.dim());
  EXPECT_EQ(e.size(), static_cast<Eigen::Index>(h.dim()));
  EXPECT_NEAR(e.sum(), 28.0, 1e-12);
}
