#include <gtest/gtest.h>

#include "clockmps/circuit.hpp"
#include "clockmps/errors.hpp"
#include "test_circuits.hpp"

using namespace clockmps;

TEST(Circuit, ParsesTheDocumentedExample) {
  const auto c = parse_circuit("wires 3\ninputs 0 1\noutput 0\nTOFFOLI 1 2 0\n");
  EXPECT_EQ(c.num_wires(), 3);
  EXPECT_EQ(c.num_gates(), 1u);
  EXPECT_EQ(c.input_wires(), (std::vector<int>{0, 1}));
  EXPECT_EQ(c.ancilla_wires(), (std::vector<int>{2}));
  EXPECT_EQ(c.gates()[0].kind(), GateKind::Toffoli);
}

TEST(Circuit, ParseErrorsCarryLineNumbers) {
  try {
    parse_circuit("wires 2\ninputs 0\noutput 0\n# comment\nCNOT 0 5\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5);
  }
  EXPECT_THROW(parse_circuit("wires 2\noutput 0\nBOGUS 1\n"), ParseError);
  EXPECT_THROW(parse_circuit("wires 2\noutput 0\nNOT\n"), ParseError);
  EXPECT_THROW(parse_circuit("wires 2\ninputs 0\n"), ParseError);
}

TEST(Circuit, SerializeRoundTrip) {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const ReversibleCircuit c(3, {1}, 0,
                            {Gate::not_gate(0), Gate::cnot(1, 2), Gate::toffoli(1, 2, 0), Gate::unitary1(1, h)});
  EXPECT_EQ(parse_circuit(serialize_circuit(c)), c);
}

TEST(Circuit, ClassicalSimulation) {
  // Toffoli(1,2 -> 0) on |011> gives |111>.
  const ReversibleCircuit c(3, {1, 2}, 0, {Gate::toffoli(1, 2, 0)});
  EXPECT_EQ(simulate_classical(c, BitString::from_string("011"), 1).to_string(), "111");
  EXPECT_EQ(simulate_classical(c, BitString::from_string("010"), 1).to_string(), "010");
  EXPECT_EQ(c.embed_input(BitString::from_string("11")).to_string(), "011");
  EXPECT_EQ(c.wrong_ancillas(BitString::from_string("111")), 1);
}

TEST(Circuit, ToffoliSequenceReproducesToffoli) {
  const ReversibleCircuit t(3, {0, 1, 2}, 0, {Gate::toffoli(0, 1, 2)});
  const ReversibleCircuit d = decompose_toffoli(t);
  EXPECT_EQ(d.num_gates(), kToffoliSequenceLength);
  EXPECT_FALSE(d.is_classical());
  EXPECT_LT((circuit_unitary(d) - circuit_unitary(t)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Circuit, InverseUndoes) {
  const auto c = samples::random_classical(4, 2, 10, 5);
  const Eigen::MatrixXcd u = circuit_unitary(c) * circuit_unitary(c.inverse());
  EXPECT_LT((u - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Circuit, InvalidConstructionRejected) {
  EXPECT_THROW(ReversibleCircuit(2, {0, 0}, 0, {Gate::not_gate(0)}), std::invalid_argument);
  EXPECT_THROW(ReversibleCircuit(2, {0}, 2, {Gate::not_gate(0)}), std::invalid_argument);
  EXPECT_THROW(ReversibleCircuit(2, {0}, 0, {}), std::invalid_argument);
  EXPECT_THROW(Gate::cnot(1, 1), std::invalid_argument);
}
