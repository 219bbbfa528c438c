#pragma once

// H = H_init + H_evol + H_final on (data qubits) x (clock of dimension T+1):
//
//   H_init  = w * sum_{ancilla a} |1><1|_a (x) |0><0|
//   H_evol  = sum_{t=1}^{T} ( -U_t (x) |t><t-1| - U_t^dag (x) |t-1><t|
//                             + 1 (x) |t-1><t-1| + 1 (x) |t><t| )
//   H_final = |0><0|_out (x) |T><T|
//
// w defaults to T. Full basis index: t * 2^M + x, with x packed as in
// circuit.hpp. The MPO chain is [time, q_0, ..., q_{M-1}], so its dense
// index is the same t * 2^M + x. The operator is not nearest-neighbour in
// that ordering; the chain is only a tensor layout.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "clockmps/circuit.hpp"
#include "clockmps/mps.hpp"
#include "clockmps/sparse.hpp"
#include "clockmps/subspace.hpp"

namespace clockmps {

enum class TermKind { Init, Evol, Final };

std::string_view term_kind_name(TermKind kind);

struct HamiltonianTerm {
  TermKind kind = TermKind::Evol;
  std::size_t t = 0;       // Init: 0; Evol: gate step 1..T; Final: T
  std::vector<int> wires;  // Init: the ancilla; Evol: gate wires; Final: output
  double weight = 1.0;
};

constexpr std::uint64_t kMaxAssemblyDim = 5'000'000;

class ClockHamiltonian {
 public:
  explicit ClockHamiltonian(ReversibleCircuit circuit,
                            std::optional<double> init_weight = std::nullopt);

  const ReversibleCircuit& circuit() const { return circuit_; }
  std::size_t num_steps() const { return circuit_.num_gates(); }
  int num_wires() const { return circuit_.num_wires(); }
  std::uint64_t data_dim() const { return std::uint64_t{1} << circuit_.num_wires(); }
  std::uint64_t time_dim() const { return num_steps() + 1; }
  /// 2^M (T+1); saturates at UINT64_MAX for M = 64.
  std::uint64_t dim() const;
  double init_weight() const { return init_weight_; }
  bool is_real() const { return circuit_.is_classical(); }

  const std::vector<HamiltonianTerm>& terms() const { return terms_; }

  std::uint64_t index(std::uint64_t x, std::size_t t) const { return t * data_dim() + x; }

  /// Nonzero entries (row, value) of column |x, t> of one term.
  void term_column(const HamiltonianTerm& term, std::uint64_t x, std::size_t t,
                   std::vector<std::pair<std::uint64_t, Complex>>& out) const;

  /// Column |x, t> of the whole operator (duplicates not merged).
  void column(std::uint64_t x, std::size_t t,
              std::vector<std::pair<std::uint64_t, Complex>>& out) const;

  /// Full sparse matrix. Real assembly requires a classical circuit.
  /// Throws BudgetError above `max_dim`.
  template <typename Scalar>
  SparseMatrix<Scalar> assemble(std::uint64_t max_dim = kMaxAssemblyDim) const;

  /// Sparse matrix of a single term on the full space.
  template <typename Scalar>
  SparseMatrix<Scalar> assemble_term(const HamiltonianTerm& term,
                                     std::uint64_t max_dim = kMaxAssemblyDim) const;

 private:
  ReversibleCircuit circuit_;
  double init_weight_;
  std::vector<HamiltonianTerm> terms_;
  std::vector<Gate> inverse_gates_;
};

/// The operator restricted to the span of all basis states reachable from
/// `seeds` (full-space indices), which is an invariant subspace.
template <typename Scalar>
struct ClockSector {
  std::vector<std::uint64_t> basis;  // full-space indices, ascending
  SparseMatrix<Scalar> matrix;

  /// Local position of a full-space index, if present.
  std::optional<std::int64_t> find(std::uint64_t index) const;
  /// Embeds a sector vector into the full space of dimension `full_dim`.
  Vector<Scalar> embed(const Vector<Scalar>& v, std::uint64_t full_dim) const;
};

template <typename Scalar>
ClockSector<Scalar> assemble_sector(const ClockHamiltonian& h,
                                    std::span<const std::uint64_t> seeds,
                                    std::uint64_t max_dim = kMaxAssemblyDim);

/// Most probable input-wire assignment of a sector vector conditioned on
/// the clock reading t = 0 (exact marginal, no dense state).
Readout read_sector_assignment(const ClockHamiltonian& h, const ClockSector<double>& sector,
                               const Vector<double>& v);

/// Seeds |embed(a), t=0> for every input assignment a (ancillas zero): the
/// sector of correctly initialized histories.
std::vector<std::uint64_t> valid_input_seeds(const ClockHamiltonian& h,
                                             int max_inputs = 24);

/// Largest |<y|H|x>| over x in one history block and y outside the block's
/// span; zero for exact block closure.
double block_leakage(const ClockHamiltonian& h, const BitString& full_input);

/// sum_t |chi_t> for t = 0..T with chi_t = U_t...U_1 |a> |t>.
struct HistoryBasis {
  BitString input;                       // full M-bit register
  bool classical = true;
  std::vector<std::uint64_t> classical_states;  // packed a(t), classical only
  std::vector<Eigen::VectorXcd> states;  // dense U_t...U_1|a>, otherwise

  std::size_t size() const { return classical ? classical_states.size() : states.size(); }
};

HistoryBasis build_history_basis(const ReversibleCircuit& circuit, const BitString& full_input);

struct HistoryState {
  HistoryBasis basis;
  std::size_t level = 0;
  int A = 0;  // wrongly initialized ancillas
  int B = 0;  // 1 if the history rejects
  std::vector<double> coefficients;    // length T+1, unit norm
  std::optional<double> normalization; // C, when the closed form applies
  double eigenvalue = 0.0;
};

/// Eigenstate of level n of the history block of `input`. `input` is either
/// an assignment of the input wires or a full M-bit register. A > 0 is
/// rejected unless `allow_penalized`, in which case the block eigenvector is
/// computed numerically with the given init weight.
HistoryState build_history_state(const ReversibleCircuit& circuit, const BitString& input,
                                 std::size_t level, bool allow_penalized = false,
                                 std::optional<double> init_weight = std::nullopt);

/// Dense vector of dimension 2^M (T+1).
template <typename Scalar>
Vector<Scalar> history_vector(const HistoryState& state, int num_wires,
                              std::uint64_t max_dim = kMaxAssemblyDim);

/// <psi| term |psi> for a full-space dense vector.
template <typename Scalar>
double term_expectation(const ClockHamiltonian& h, const HamiltonianTerm& term,
                        const Vector<Scalar>& psi);

struct MpoBuildOptions {
  bool compress = true;
  double rel_cutoff = 1e-13;
};

/// MPO over [time, q_0, ..., q_{M-1}] of the given subset of terms.
template <typename Scalar>
Mpo<Scalar> terms_to_mpo(const ClockHamiltonian& h, std::span<const HamiltonianTerm> terms,
                         const MpoBuildOptions& options = {});

template <typename Scalar>
Mpo<Scalar> hamiltonian_to_mpo(const ClockHamiltonian& h, const MpoBuildOptions& options = {}) {
  return terms_to_mpo<Scalar>(h, h.terms(), options);
}

/// MPS of a history state over [time, q_0, ..., q_{M-1}]. Classical
/// circuits are built from the T+1 strings directly (bond dimension at most
/// T+1 before compression); others go through the dense vector.
template <typename Scalar>
Mps<Scalar> history_state_as_mps(const HistoryState& state, int num_wires,
                                 const Truncation& trunc = {});

}  // namespace clockmps
