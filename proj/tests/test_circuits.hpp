#pragma once

// Small circuits shared by the test binaries.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "clockmps/circuit.hpp"
#include "clockmps/instances.hpp"

namespace clockmps::samples {

/// NOT on wire 0, which is both input and output. Accepts input 0.
inline ReversibleCircuit not_circuit() { return ReversibleCircuit(1, {0}, 0, {Gate::not_gate(0)}); }

inline CnfFormula cnf(int vars, std::vector<std::vector<int>> clauses) {
  CnfFormula f;
  f.num_vars = vars;
  f.clauses = std::move(clauses);
  f.validate();
  return f;
}

/// (x1 or x2).
inline CnfFormula or_formula() { return cnf(2, {{1, 2}}); }

inline ReversibleCircuit or_verifier() { return build_sat_verifier(or_formula()); }

struct NamedFormula {
  std::string name;
  CnfFormula formula;
};

/// Satisfiable formulas with at most 4 variables.
inline std::vector<NamedFormula> small_sat_formulas() {
  return {
      {"x1|x2", cnf(2, {{1, 2}})},
      {"x1&x2", cnf(2, {{1}, {2}})},
      {"x1^x2", cnf(2, {{1, 2}, {-1, -2}})},
      {"x1|x2|x3", cnf(3, {{1, 2, 3}})},
      {"(x1|x2)&(x3|-x4)", cnf(4, {{1, 2}, {3, -4}})},
      {"(x1|-x2|x3)&(-x1|x4)&(x2|x3|-x4)", cnf(4, {{1, -2, 3}, {-1, 4}, {2, 3, -4}})},
  };
}

/// Brute-force count of satisfying assignments.
inline std::size_t count_models(const CnfFormula& f) {
  std::size_t n = 0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << f.num_vars); ++a)
    if (f.evaluate(BitString::from_index(a, static_cast<std::size_t>(f.num_vars)))) ++n;
  return n;
}

/// Random {NOT, CNOT, TOFFOLI} circuit; wire 0 is the output and the first
/// `inputs` wires after it are inputs.
inline ReversibleCircuit random_classical(int wires, int inputs, std::size_t gates, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Gate> g;
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  while (g.size() < gates) {
    const int kind = wires >= 3 ? pick(3) : pick(std::min(wires, 2));
    if (kind == 0) {
      g.push_back(Gate::not_gate(pick(wires)));
    } else if (kind == 1) {
      const int c = pick(wires);
      int t = pick(wires);
      if (t == c) continue;
      g.push_back(Gate::cnot(c, t));
    } else {
      const int a = pick(wires), b = pick(wires), t = pick(wires);
      if (a == b || a == t || b == t) continue;
      g.push_back(Gate::toffoli(a, b, t));
    }
  }
  std::vector<int> in;
  for (int i = 1; i <= inputs; ++i) in.push_back(i);
  return ReversibleCircuit(wires, in, 0, std::move(g));
}

/// A Toffoli into a fresh ancilla followed by a CNOT into the output.
inline ReversibleCircuit and_circuit() {
  return ReversibleCircuit(4, {1, 2}, 0, {Gate::toffoli(1, 2, 3), Gate::cnot(3, 0), Gate::not_gate(0)});
}

}  // namespace clockmps::samples
