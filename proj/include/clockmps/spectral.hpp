#pragma once

// Exact and Lanczos spectra of assembled clock Hamiltonians, ground-space
// degeneracy, the padded gap-scaling family, and the verification suite
// behind `clockmps spectrum`.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clockmps/clock_hamiltonian.hpp"
#include "clockmps/lanczos.hpp"

namespace clockmps {

enum class SolverKind { Dense, Lanczos };

std::string_view solver_name(SolverKind kind);

constexpr double kDegeneracyTol = 1e-8;
constexpr std::uint64_t kMaxDenseDim = 8192;

struct SpectrumReport {
  std::uint64_t data_dim = 0;
  std::uint64_t time_dim = 0;
  std::uint64_t dim = 0;
  std::vector<double> eigenvalues;  // ascending: all (dense) or the lowest k
  double ground_energy = 0.0;
  int ground_degeneracy = 0;
  /// First level above the ground set minus the ground energy; absent when
  /// every computed eigenvalue lies in the ground set.
  std::optional<double> gap;
  bool degenerate_at_tolerance = false;
  SolverKind solver = SolverKind::Dense;
  double degeneracy_tol = kDegeneracyTol;
  double solver_tol = 0.0;
  double max_residual = 0.0;
  bool converged = true;
};

/// Fills degeneracy and gap from ascending eigenvalues.
SpectrumReport summarize_spectrum(std::vector<double> eigenvalues, SolverKind solver,
                                  double degeneracy_tol = kDegeneracyTol);

/// Dense diagonalization. BudgetError above `max_dim` (use Lanczos).
SpectrumReport full_spectrum(const ClockHamiltonian& h, std::uint64_t max_dim = kMaxDenseDim,
                             double degeneracy_tol = kDegeneracyTol);

/// Lowest k pairs with residual <= tol * ||H|| (row-sum bound).
template <typename Scalar>
LanczosResult<Scalar> lowest_eigenpairs(const SparseMatrix<Scalar>& h, int k, double tol = 1e-10,
                                        std::uint64_t seed = 0x5eed, int max_krylov = 200);

struct LanczosSpectrumOptions {
  int k = 4;
  double tol = 1e-10;
  std::uint64_t seed = 0x5eed;
  int max_krylov = 200;
  /// Doubles k while every computed value is in the ground set.
  bool extend_degenerate = true;
  double degeneracy_tol = kDegeneracyTol;
};

SpectrumReport lanczos_spectrum(const SparseMatrix<double>& h, const LanczosSpectrumOptions& options,
                                LanczosResult<double>* pairs = nullptr);
SpectrumReport lanczos_spectrum(const SparseMatrix<Complex>& h, const LanczosSpectrumOptions& options,
                                LanczosResult<Complex>* pairs = nullptr);

/// Full-space Lanczos on the assembled operator.
SpectrumReport lowest_spectrum(const ClockHamiltonian& h, const LanczosSpectrumOptions& options,
                               std::uint64_t max_dim = kMaxAssemblyDim);

/// Spectrum of the correctly-initialized sector (all inputs, ancillas zero)
/// of a classical circuit, with the certificate that it holds the global
/// low-energy spectrum: every other history block dominates the A=1, B=0
/// tridiagonal block, whose ground energy is `outside_lower_bound`.
struct SectorSpectrum {
  SpectrumReport report;
  ClockSector<double> sector;
  LanczosResult<double> pairs;
  double outside_lower_bound = 0.0;  // +inf without ancillas
  bool ground_certified = false;     // ground energy below the bound
  bool gap_certified = false;        // first excited level below the bound
};

SectorSpectrum valid_sector_spectrum(const ClockHamiltonian& h, const LanczosSpectrumOptions& options,
                                     std::uint64_t max_dim = kMaxAssemblyDim);

/// Multiset union over all 2^M registers of the tridiagonal block spectra
/// (classical circuits), ascending.
std::vector<double> block_union_spectrum(const ClockHamiltonian& h, int max_wires = 16);

/// Pads a circuit to exactly `target_steps` gates with NOTs on one extra
/// spectator ancilla (appended as wire M): pairs, plus one more NOT when
/// the count is odd. The acceptance behavior is unchanged.
ReversibleCircuit pad_circuit(const ReversibleCircuit& base, std::size_t target_steps);

struct GapRow {
  std::size_t T = 0;
  int M = 0;
  std::uint64_t dim = 0;
  double ground_energy = 0.0;
  int degeneracy = 0;
  double gap = 0.0;
  double gap_T2 = 0.0;
  SolverKind solver = SolverKind::Dense;
};

struct GapSweepOptions {
  std::uint64_t max_dense_dim = 2048;
  LanczosSpectrumOptions lanczos;
  int threads = 1;
};

/// One row per T, in the order given.
std::vector<GapRow> gap_scaling_experiment(const ReversibleCircuit& base,
                                           const std::vector<std::size_t>& steps,
                                           const GapSweepOptions& options = {});

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured discrepancy or margin
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  double tol = 1e-9;
  bool inject_wrong_lambda = false;  // negative control: perturbs the analytic values
  std::uint64_t max_dense_dim = kMaxDenseDim;
  int max_enumerated_inputs = 16;
  LanczosSpectrumOptions lanczos;  // sector path above max_dense_dim
};

/// Hermiticity, positivity, block union, closed form vs numerics, history
/// residuals, degeneracy vs accepting count, and bound dominance.
std::vector<CheckResult> verify_spectrum(const ClockHamiltonian& h, const VerifyOptions& options = {});

struct VerifyResult {
  SpectrumReport report;
  std::vector<CheckResult> checks;
};

/// Dense spectrum and the checks above when the dimension allows;
/// otherwise (classical circuits) the valid-sector spectrum with its
/// certificate, the closed forms, degeneracy and the bounds.
VerifyResult verify_spectrum_report(const ClockHamiltonian& h, const VerifyOptions& options = {});

}  // namespace clockmps
