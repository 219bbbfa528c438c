#pragma once

// Reversible circuit IR.
//
// Wires are numbered 0..M-1. Basis states of the data register are packed
// into integers with wire 0 as the most significant bit, so the state
// |b_0 b_1 ... b_{M-1}> has index sum_w b_w 2^(M-1-w). BitString text uses the
// same order: "110" means wire 0 = 1, wire 1 = 1, wire 2 = 0.
//
// Gates act in list order: gates[0] is U_1.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace clockmps {

using Complex = std::complex<double>;

enum class GateKind { Not, Cnot, Toffoli, Unitary1, Unitary2 };

std::string_view gate_kind_name(GateKind kind);

class Gate {
 public:
  static Gate not_gate(int target);
  static Gate cnot(int control, int target);
  static Gate toffoli(int control1, int control2, int target);
  /// `u` is 2x2, must be unitary to 1e-12.
  static Gate unitary1(int wire, const Eigen::Matrix2cd& u);
  /// `u` is 4x4 on (wire_a, wire_b); local index = 2*b_a + b_b.
  static Gate unitary2(int wire_a, int wire_b, const Eigen::Matrix4cd& u);

  GateKind kind() const { return kind_; }
  std::span<const int> wires() const { return wires_; }
  int arity() const { return static_cast<int>(wires_.size()); }
  bool is_classical() const {
    return kind_ == GateKind::Not || kind_ == GateKind::Cnot ||
           kind_ == GateKind::Toffoli;
  }

  /// Explicit matrix; empty for the classical kinds.
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  /// Local 2^k x 2^k unitary for any kind (permutation for classical gates),
  /// in the local index order of wires().
  Eigen::MatrixXcd local_matrix() const;

  Gate inverse() const;

  /// Image of a classical basis state under a classical gate.
  std::uint64_t apply_classical(std::uint64_t state, int num_wires) const;

  /// Nonzero amplitudes of U|x> for basis state x.
  void column(std::uint64_t x, int num_wires,
              std::vector<std::pair<std::uint64_t, Complex>>& out) const;

  bool operator==(const Gate& other) const;

 private:
  Gate(GateKind kind, std::vector<int> wires, Eigen::MatrixXcd matrix);

  GateKind kind_;
  std::vector<int> wires_;
  Eigen::MatrixXcd matrix_;
};

/// Bit of `wire` inside a packed basis index.
inline std::uint64_t wire_mask(int num_wires, int wire) {
  return std::uint64_t{1} << (num_wires - 1 - wire);
}

class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t length) : bits_(length, 0) {}
  explicit BitString(std::vector<std::uint8_t> bits);

  /// Parses "0110"; throws std::invalid_argument on other characters.
  static BitString from_string(std::string_view text);
  /// Wire 0 is the most significant bit of `index`.
  static BitString from_index(std::uint64_t index, std::size_t length);

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  std::uint64_t to_index() const;
  std::string to_string() const;
  std::span<const std::uint8_t> bits() const { return bits_; }

  auto operator<=>(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

class ReversibleCircuit {
 public:
  /// Ancilla wires are the complement of `input_wires`. Throws
  /// std::invalid_argument on any violated invariant (M >= 1, T >= 1,
  /// distinct in-range wires, output in range).
  ReversibleCircuit(int num_wires, std::vector<int> input_wires, int output_wire,
                    std::vector<Gate> gates);

  int num_wires() const { return num_wires_; }
  std::size_t num_gates() const { return gates_.size(); }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<int>& input_wires() const { return input_wires_; }
  const std::vector<int>& ancilla_wires() const { return ancilla_wires_; }
  int output_wire() const { return output_wire_; }
  bool is_classical() const;

  /// Gates reversed and inverted.
  ReversibleCircuit inverse() const;

  /// Full register for an assignment of the input wires (ancillas zero).
  BitString embed_input(const BitString& inputs) const;
  /// Input-wire projection of a full register.
  BitString restrict_to_inputs(const BitString& full) const;
  /// Number of ancilla wires set in a full register (the A penalty count).
  int wrong_ancillas(const BitString& full) const;

  bool operator==(const ReversibleCircuit& other) const;

 private:
  int num_wires_;
  std::vector<int> input_wires_;
  std::vector<int> ancilla_wires_;
  int output_wire_;
  std::vector<Gate> gates_;
};

/// a(t) = U_t ... U_1 a for a classical circuit.
BitString simulate_classical(const ReversibleCircuit& circuit,
                             const BitString& input, std::size_t upto);

/// Packed variant; `input` is a basis index.
std::uint64_t simulate_classical(const ReversibleCircuit& circuit,
                                 std::uint64_t input, std::size_t upto);

constexpr int kMaxStatevectorWires = 24;

/// U_t ... U_1 |input> as a dense vector of dimension 2^M.
Eigen::VectorXcd simulate_statevector(const ReversibleCircuit& circuit,
                                      const BitString& input, std::size_t upto,
                                      int max_wires = kMaxStatevectorWires);

/// Applies one gate in place to a dense state.
void apply_gate(const Gate& gate, int num_wires, Eigen::VectorXcd& state);

/// Dense 2^M x 2^M unitary of the whole circuit (small M only).
Eigen::MatrixXcd circuit_unitary(const ReversibleCircuit& circuit,
                                 int max_wires = 12);

/// Toffoli on (c1, c2, t) as CNOTs plus H, T, T^dagger (15 gates):
///   H(t) CX(c2,t) Tdg(t) CX(c1,t) T(t) CX(c2,t) Tdg(t) CX(c1,t)
///   T(c2) T(t) H(t) CX(c1,c2) T(c1) Tdg(c2) CX(c1,c2)
std::vector<Gate> toffoli_sequence(int control1, int control2, int target);
constexpr std::size_t kToffoliSequenceLength = 15;

/// Replaces every Toffoli with toffoli_sequence; other gates are kept.
ReversibleCircuit decompose_toffoli(const ReversibleCircuit& circuit);

/// Line-based text format:
///   wires M / inputs i1 i2 ... / output j / one gate per line
/// '#' starts a comment. Throws ParseError with the 1-based line number.
ReversibleCircuit parse_circuit(std::string_view text);
std::string serialize_circuit(const ReversibleCircuit& circuit);

}  // namespace clockmps
