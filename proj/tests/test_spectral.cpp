#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "clockmps/errors.hpp"
#include "clockmps/spectral.hpp"
#include "test_circuits.hpp"

using namespace clockmps;

TEST(Spectral, NotCircuitFrozenSpectrum) {
  const auto r = full_spectrum(ClockHamiltonian(samples::not_circuit()));
  ASSERT_EQ(r.eigenvalues.size(), 4u);
  // {0, 2} from the accepting block, (3 -+ sqrt 5)/2 from the rejecting one.
  EXPECT_NEAR(r.eigenvalues[0], 0.0, 1e-14);
  EXPECT_NEAR(r.eigenvalues[1], 0.3819660112501051, 1e-14);
  EXPECT_NEAR(r.eigenvalues[2], 2.0, 1e-14);
  EXPECT_NEAR(r.eigenvalues[3], 2.618033988749895, 1e-14);
  EXPECT_EQ(r.ground_degeneracy, 1);
  ASSERT_TRUE(r.gap.has_value());
  EXPECT_NEAR(*r.gap, 0.3819660112501051, 1e-14);
}

TEST(Spectral, SummarizeDegeneracy) {
  const auto r = summarize_spectrum({0.0, 1e-10, 0.5, 1.0}, SolverKind::Dense);
  EXPECT_EQ(r.ground_degeneracy, 2);
  EXPECT_NEAR(*r.gap, 0.5, 1e-9);
  EXPECT_FALSE(summarize_spectrum({1.0, 1.0}, SolverKind::Dense).gap.has_value());
}

TEST(Spectral, DenseBudgetRefusal) {
  const ClockHamiltonian h(samples::random_classical(10, 3, 12, 1));
  EXPECT_THROW(full_spectrum(h, 1000), BudgetError);
}

TEST(Spectral, LanczosAgreesWithDense) {
  const ClockHamiltonian h(samples::or_verifier());
  const auto dense = full_spectrum(h);
  LanczosSpectrumOptions o;
  o.k = 2;
  const auto lz = lowest_spectrum(h, o);
  EXPECT_EQ(lz.solver, SolverKind::Lanczos);
  EXPECT_EQ(lz.ground_degeneracy, 3);  // extended past the triple ground set
  EXPECT_NEAR(lz.ground_energy, 0.0, 1e-10);
  ASSERT_TRUE(lz.gap.has_value());
  EXPECT_NEAR(*lz.gap, *dense.gap, 1e-9);
}

TEST(Spectral, SectorSpectrumCertified) {
  const ClockHamiltonian h(samples::or_verifier());
  const auto s = valid_sector_spectrum(h, LanczosSpectrumOptions{});
  EXPECT_TRUE(s.ground_certified);
  EXPECT_EQ(s.report.ground_degeneracy, 3);
  const double a1 = numeric_eigenvalues(SubspaceHamiltonian(PenaltyProfile::canonical(6, 1, 0)), 0, 1)[0];
  EXPECT_NEAR(s.outside_lower_bound, a1, 1e-12);
}

TEST(Spectral, BlockUnionMatchesDense) {
  for (const auto& c : {samples::not_circuit(), samples::or_verifier(), samples::and_circuit()}) {
    const ClockHamiltonian h(c);
    const auto full = full_spectrum(h);
    const auto blocks = block_union_spectrum(h);
    ASSERT_EQ(blocks.size(), full.eigenvalues.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) EXPECT_NEAR(blocks[i], full.eigenvalues[i], 1e-9);
  }
}

TEST(Spectral, PaddingKeepsAcceptance) {
  const auto base = samples::or_verifier();
  const auto padded = pad_circuit(base, 11);
  EXPECT_EQ(padded.num_gates(), 11u);
  EXPECT_EQ(padded.num_wires(), base.num_wires() + 1);
  EXPECT_EQ(enumerate_accepting(padded).size(), enumerate_accepting(base).size());
  EXPECT_THROW(pad_circuit(base, 3), std::invalid_argument);
}

TEST(Spectral, GapScalingRowsDeterministicAcrossThreads) {
  const std::vector<std::size_t> steps{1, 2, 4, 8, 16};
  GapSweepOptions one, four;
  four.threads = 4;
  const auto a = gap_scaling_experiment(samples::not_circuit(), steps, one);
  const auto b = gap_scaling_experiment(samples::not_circuit(), steps, four);
  ASSERT_EQ(a.size(), steps.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].T, steps[i]);
    EXPECT_EQ(a[i].gap, b[i].gap);
    EXPECT_NEAR(a[i].gap_T2, a[i].gap * double(a[i].T * a[i].T), 1e-12);
    EXPECT_GT(a[i].gap_T2, 0.25);
    EXPECT_LT(a[i].gap_T2, std::numbers::pi * std::numbers::pi);
  }
}

TEST(Spectral, VerificationPassesAndNegativeControlFails) {
  for (const auto& c : {samples::not_circuit(), samples::or_verifier()}) {
    const ClockHamiltonian h(c);
    for (const auto& chk : verify_spectrum(h)) EXPECT_TRUE(chk.passed) << chk.name << " " << chk.value;
    VerifyOptions bad;
    bad.inject_wrong_lambda = true;
    bool any_failed = false;
    for (const auto& chk : verify_spectrum(h, bad)) any_failed = any_failed || !chk.passed;
    EXPECT_TRUE(any_failed);
  }
}

TEST(Spectral, SectorVerificationForLargeInstances) {
  const ClockHamiltonian h(build_factoring_verifier({15, 3}));
  const auto res = verify_spectrum_report(h);
  EXPECT_EQ(res.report.solver, SolverKind::Lanczos);
  for (const auto& chk : res.checks) EXPECT_TRUE(chk.passed) << chk.name << " " << chk.detail;
  EXPECT_EQ(res.report.ground_degeneracy, 1);
}

TEST(Spectral, NoInstanceGroundEnergy) {
  // Unsatisfiable: x1 and not x1.
  const auto c = build_sat_verifier(samples::cnf(1, {{1}, {-1}}));
  const ClockHamiltonian h(c);
  const auto r = full_spectrum(h);
  EXPECT_NEAR(r.ground_energy, AnalyticSpectrum(c.num_gates(), SpectrumCase::A0B1).eigenvalue(0), 1e-10);
  for (const auto& chk : verify_spectrum(h)) EXPECT_TRUE(chk.passed) << chk.name;
}

TEST(Spectral, LanczosDegenerateGroundSetAgainstDense) {
  const ClockHamiltonian h(build_sat_verifier(samples::cnf(3, {{1, 2, 3}})));
  const auto dense = full_spectrum(h);
  LanczosSpectrumOptions o;
  o.k = 9;
  const auto lz = lowest_spectrum(h, o);
  EXPECT_TRUE(lz.converged);
  EXPECT_EQ(lz.ground_degeneracy, 7);
  for (std::size_t i = 0; i < lz.eigenvalues.size(); ++i)
    EXPECT_NEAR(lz.eigenvalues[i], dense.eigenvalues[i], 1e-8) << i;
}
