#include <gtest/gtest.h>

#include <cmath>

#include "clockmps/clock_hamiltonian.hpp"
#include "clockmps/dmrg.hpp"
#include "clockmps/spectral.hpp"
#include "test_circuits.hpp"

using namespace clockmps;

TEST(Dmrg, ConfigValidation) {
  DmrgConfig<double> c;
  c.max_bond = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.num_sweeps = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.energy_tol = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Dmrg, NotCircuitFindsHistoryState) {
  const ClockHamiltonian h(samples::not_circuit());
  DmrgConfig<double> c;
  c.max_bond = 2;
  const auto tr = dmrg_ground_state(hamiltonian_to_mpo<double>(h), c);
  EXPECT_NEAR(tr.final_energy, 0.0, 1e-10);
  const auto st = build_history_state(samples::not_circuit(), BitString::from_string("0"), 0);
  const auto ref = history_state_as_mps<double>(st, 1);
  EXPECT_NEAR(fidelity(ref, tr.final_state), 1.0, 1e-10);
}

TEST(Dmrg, MatchesExactGroundEnergy) {
  for (const auto& circ : {samples::or_verifier(), samples::and_circuit(),
                           build_sat_verifier(samples::cnf(1, {{1}, {-1}}))}) {
    const ClockHamiltonian h(circ);
    const double e0 = full_spectrum(h).ground_energy;
    DmrgConfig<double> c;
    c.max_bond = static_cast<Index>(circ.num_gates() + 1);
    c.num_sweeps = 20;
    const auto tr = dmrg_ground_state(hamiltonian_to_mpo<double>(h), c);
    EXPECT_GE(tr.final_energy, e0 - 1e-10);  // variational
    EXPECT_NEAR(tr.final_energy, e0, 1e-8);
    EXPECT_TRUE(tr.converged);
    EXPECT_EQ(tr.sweep_energies.size(), static_cast<std::size_t>(tr.sweeps_run));
    EXPECT_NEAR(norm(tr.final_state), 1.0, 1e-10);
  }
}

TEST(Dmrg, FinalTermAlone) {
  // H_final alone is a projector; its ground energy is zero.
  const ClockHamiltonian h(samples::or_verifier());
  const std::vector<HamiltonianTerm> only{h.terms().back()};
  const auto mpo = terms_to_mpo<double>(h, only);
  DmrgConfig<double> c;
  c.max_bond = 4;
  const auto tr = dmrg_ground_state(mpo, c);
  EXPECT_NEAR(tr.final_energy, 0.0, 1e-10);
}

TEST(Dmrg, DeterministicForFixedSeed) {
  const ClockHamiltonian h(samples::or_verifier());
  const auto mpo = hamiltonian_to_mpo<double>(h);
  DmrgConfig<double> c;
  c.max_bond = 3;
  c.num_sweeps = 4;
  c.seed = 9;
  const auto a = dmrg_ground_state(mpo, c);
  const auto b = dmrg_ground_state(mpo, c);
  EXPECT_EQ(a.update_energies, b.update_energies);
  EXPECT_EQ(a.final_energy, b.final_energy);
}

TEST(Dmrg, OneSiteModeFromProductState) {
  const ClockHamiltonian h(samples::not_circuit());
  DmrgConfig<double> c;
  c.two_site = false;
  c.max_bond = 2;
  c.init = DmrgInit::Given;
  c.initial = random_mps<double>(std::vector<Index>{2, 2}, 2, 3);
  c.num_sweeps = 20;
  const auto tr = dmrg_ground_state(hamiltonian_to_mpo<double>(h), c);
  EXPECT_NEAR(tr.final_energy, 0.0, 1e-8);
}

TEST(Dmrg, ProductInitializationNeverRaisesEnergy) {
  // Two-site updates from |t=0, 000> can stall at the product energy (no
  // noise term); only monotonicity is guaranteed.
  const ClockHamiltonian h(samples::or_verifier());
  const auto mpo = hamiltonian_to_mpo<double>(h);
  const std::vector<Index> cfg(4, 0);
  const double e_start = expectation(product_state<double>(mpo.phys_dims(), cfg), mpo);
  EXPECT_NEAR(e_start, 1.0, 1e-14);
  DmrgConfig<double> c;
  c.init = DmrgInit::Product;
  c.product_config = cfg;
  c.max_bond = 7;
  c.num_sweeps = 10;
  const auto tr = dmrg_ground_state(mpo, c);
  EXPECT_LE(tr.final_energy, e_start + 1e-12);
  for (std::size_t i = 1; i < tr.sweep_energies.size(); ++i)
    EXPECT_LE(tr.sweep_energies[i], tr.sweep_energies[i - 1] + 1e-10);
  EXPECT_GE(tr.final_energy, -1e-10);
}

TEST(Dmrg, ConvergenceExperimentRowsOrderedAndThreadIndependent) {
  const ClockHamiltonian h(samples::or_verifier());
  const double gap = *full_spectrum(h).gap;
  std::vector<ConvergenceInstance> inst{{"or", hamiltonian_to_mpo<double>(h), 0.0, gap}};
  ConvergenceGrid g;
  g.seeds = {1, 2};
  g.bonds = {2, 7};
  g.sweeps = {6};
  const auto a = convergence_experiment(inst, g);
  g.threads = 3;
  const auto b = convergence_experiment(inst, g);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0].seed, 1u);
  EXPECT_EQ(a[0].max_bond, 2);
  EXPECT_EQ(a[1].max_bond, 7);
  EXPECT_EQ(a[2].seed, 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].final_energy, b[i].final_energy);
    EXPECT_EQ(a[i].success, a[i].error < gap / 2);
  }
  EXPECT_TRUE(a[1].success);
}
