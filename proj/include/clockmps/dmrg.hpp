#pragma once

// Variational ground-state search over MPS (two-site sweeps, one-site
// behind a flag) and the convergence experiment harness.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clockmps/mps.hpp"

namespace clockmps {

enum class DmrgInit { Random, Product, Given };

template <typename Scalar>
struct DmrgConfig {
  Index max_bond = 16;
  int num_sweeps = 10;
  double energy_tol = 1e-10;   // stop when a full sweep changes E by less
  double local_tol = 1e-12;    // local Lanczos residual, relative
  int local_max_iter = 60;     // local Krylov dimension
  double svd_cutoff = 1e-12;   // relative singular-value cutoff
  DmrgInit init = DmrgInit::Random;
  std::uint64_t seed = 1;
  std::vector<Index> product_config;      // Product
  std::optional<Mps<Scalar>> initial;     // Given
  bool two_site = true;

  /// Throws std::invalid_argument when D < 1, sweeps < 1 or a tolerance <= 0.
  void validate() const;
};

template <typename Scalar>
struct DmrgTrace {
  std::vector<double> sweep_energies;   // after each full (right+left) sweep
  std::vector<double> update_energies;  // after each local update
  double final_energy = 0.0;            // <psi|H|psi> / <psi|psi> of the final state
  Mps<Scalar> final_state;
  bool converged = false;
  int sweeps_run = 0;
  double wall_seconds = 0.0;
};

template <typename Scalar>
DmrgTrace<Scalar> dmrg_ground_state(const Mpo<Scalar>& mpo, const DmrgConfig<Scalar>& config);

extern template struct DmrgConfig<double>;
extern template struct DmrgConfig<Complex>;
extern template DmrgTrace<double> dmrg_ground_state<double>(const Mpo<double>&,
                                                            const DmrgConfig<double>&);
extern template DmrgTrace<Complex> dmrg_ground_state<Complex>(const Mpo<Complex>&,
                                                              const DmrgConfig<Complex>&);

struct ConvergenceRun {
  std::string instance;
  std::uint64_t seed = 0;
  Index max_bond = 0;
  int sweeps = 0;
  double final_energy = 0.0;
  std::optional<double> exact_energy;  // ED ground energy, when known
  double error = 0.0;                  // final - exact (NaN without one)
  bool success = false;                // final - exact < gap / 2
  double wall_seconds = 0.0;
};

struct ConvergenceInstance {
  std::string name;
  Mpo<double> mpo;
  double ground_energy = 0.0;  // exact, or 0 for frustration-free yes instances
  double gap = 0.0;            // known spectral gap
};

struct ConvergenceGrid {
  std::vector<std::uint64_t> seeds{1};
  std::vector<Index> bonds{4};
  std::vector<int> sweeps{10};
  int threads = 1;
};

/// One run per (instance, seed, D, sweeps), rows ordered lexicographically in
/// that order.
std::vector<ConvergenceRun> convergence_experiment(const std::vector<ConvergenceInstance>& instances,
                                                   const ConvergenceGrid& grid);

}  // namespace clockmps
