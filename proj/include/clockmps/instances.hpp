#pragma once

// NP verifier circuits over {NOT, CNOT, TOFFOLI}.
//
// Layout shared by both generators: wire 0 is the accept flag (an ancilla),
// input wires follow, then ancillas allocated in construction order.
// Intermediate flags are never uncomputed.

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "clockmps/circuit.hpp"

namespace clockmps {

struct CnfFormula {
  int num_vars = 0;
  /// DIMACS literals: +v means x_v, -v means not x_v, v in [1, num_vars].
  std::vector<std::vector<int>> clauses;

  /// Throws std::invalid_argument on an out-of-range literal or empty clause.
  void validate() const;
  /// assignment[i] is x_{i+1}.
  bool evaluate(const BitString& assignment) const;
};

/// DIMACS CNF: 'c' comment lines, a `p cnf V C` header, zero-terminated
/// clauses that may span lines. Throws ParseError.
CnfFormula parse_dimacs(std::string_view text);

struct FactoringInstance {
  std::uint64_t modulus = 0;
  int factor_bits = 0;

  /// 3 <= modulus < 2^(2 * factor_bits), factor_bits in [1, 16].
  void validate() const;
};

struct InstanceMeta {
  std::uint64_t problem_size = 0;  // bits of the instance description
  std::optional<std::uint64_t> num_accepting;
};

/// Output is 1 iff the input wires (x_1..x_V, wires 1..V) satisfy the formula.
ReversibleCircuit build_sat_verifier(const CnfFormula& formula, int max_wires = 64);

/// Inputs are p then q, each `factor_bits` wide, most significant bit first.
/// Output is 1 iff p * q == modulus and 1 < p <= q.
ReversibleCircuit build_factoring_verifier(const FactoringInstance& inst,
                                           int max_wires = 64);

/// (p, q) encoded by an input-wire assignment of a factoring verifier.
std::pair<std::uint64_t, std::uint64_t> decode_factors(const BitString& inputs,
                                                       int factor_bits);

constexpr int kMaxEnumeratedInputs = 24;

/// Accepted input assignments (ancillas zero), by exhaustive simulation.
/// Sorted ascending.
std::vector<BitString> enumerate_accepting(const ReversibleCircuit& circuit,
                                           int max_inputs = kMaxEnumeratedInputs);

InstanceMeta describe(const CnfFormula& formula, const ReversibleCircuit& circuit);
InstanceMeta describe(const FactoringInstance& inst, const ReversibleCircuit& circuit);

}  // namespace clockmps
