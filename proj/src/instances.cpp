#include "clockmps/instances.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <string>

#include "clockmps/errors.hpp"

namespace clockmps {

namespace {

// Gate list plus a bump allocator for ancilla wires.
class Builder {
 public:
  Builder(int first_free, int max_wires) : next_(first_free), max_wires_(max_wires) {}

  int fresh() {
    const int w = next_++;
    return w;
  }
  int used() const { return next_; }

  void x(int a) { gates_.push_back(Gate::not_gate(a)); }
  void cx(int c, int t) { gates_.push_back(Gate::cnot(c, t)); }
  void ccx(int c1, int c2, int t) { gates_.push_back(Gate::toffoli(c1, c2, t)); }

  /// target ^= AND(wires); intermediates are fresh ancillas.
  void and_into(const std::vector<int>& wires, int target) {
    if (wires.empty()) {
      x(target);
    } else if (wires.size() == 1) {
      cx(wires[0], target);
    } else if (wires.size() == 2) {
      ccx(wires[0], wires[1], target);
    } else {
      int acc = fresh();
      ccx(wires[0], wires[1], acc);
      for (std::size_t i = 2; i + 1 < wires.size(); ++i) {
        const int nxt = fresh();
        ccx(acc, wires[i], nxt);
        acc = nxt;
      }
      ccx(acc, wires.back(), target);
    }
  }

  ReversibleCircuit finish(std::vector<int> inputs, const char* what) {
    if (next_ > max_wires_)
      throw BudgetError(std::string(what) + " wire count", static_cast<std::uint64_t>(next_),
                        static_cast<std::uint64_t>(max_wires_));
    return ReversibleCircuit(next_, std::move(inputs), 0, std::move(gates_));
  }

 private:
  int next_;
  int max_wires_;
  std::vector<Gate> gates_;
};

// Drops duplicate literals; returns nullopt for tautological clauses.
std::optional<std::vector<int>> normalize_clause(const std::vector<int>& clause) {
  std::set<int> lits(clause.begin(), clause.end());
  for (int l : lits)
    if (lits.count(-l)) return std::nullopt;
  return std::vector<int>(lits.begin(), lits.end());
}

int bit_length(std::uint64_t v) { return v == 0 ? 0 : 64 - std::countl_zero(v); }

}  // namespace

void CnfFormula::validate() const {
  if (num_vars < 0) throw std::invalid_argument("CNF: negative variable count");
  for (const auto& c : clauses) {
    if (c.empty()) throw std::invalid_argument("CNF: empty clause");
    for (int l : c)
      if (l == 0 || std::abs(l) > num_vars)
        throw std::invalid_argument("CNF: literal " + std::to_string(l) + " out of range");
  }
}

bool CnfFormula::evaluate(const BitString& assignment) const {
  if (assignment.size() != static_cast<std::size_t>(num_vars))
    throw std::invalid_argument("CNF: assignment length mismatch");
  for (const auto& c : clauses) {
    bool sat = false;
    for (int l : c) {
      const bool v = assignment[static_cast<std::size_t>(std::abs(l) - 1)] != 0;
      if ((l > 0) == v) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula f;
  bool have_header = false;
  std::size_t declared_clauses = 0;
  std::vector<int> current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    line = line.substr(first);
    if (line[0] == 'c') continue;
    if (line[0] == '%') break;  // SATLIB end marker
    if (line[0] == 'p') {
      if (have_header) throw ParseError(line_no, "duplicate problem line");
      char fmt[8] = {};
      int v = 0;
      long c = 0;
      const std::string s(line);
      if (std::sscanf(s.c_str(), "p %7s %d %ld", fmt, &v, &c) != 3 ||
          std::string_view(fmt) != "cnf" || v < 0 || c < 0)
        throw ParseError(line_no, "expected 'p cnf <vars> <clauses>'");
      f.num_vars = v;
      declared_clauses = static_cast<std::size_t>(c);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause before 'p cnf' header");
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      int lit = 0;
      const auto [p, ec] = std::from_chars(line.data() + i, line.data() + line.size(), lit);
      if (ec != std::errc{})
        throw ParseError(line_no, "expected integer literal");
      i = static_cast<std::size_t>(p - line.data());
      if (lit == 0) {
        if (current.empty()) throw ParseError(line_no, "empty clause");
        f.clauses.push_back(std::move(current));
        current.clear();
      } else {
        if (std::abs(lit) > f.num_vars)
          throw ParseError(line_no, "literal " + std::to_string(lit) + " exceeds variable count");
        current.push_back(lit);
      }
    }
  }
  if (!have_header) throw ParseError(0, "missing 'p cnf' header");
  if (!current.empty()) f.clauses.push_back(std::move(current));
  if (f.clauses.size() != declared_clauses)
    throw ParseError(0, "header declares " + std::to_string(declared_clauses) +
                            " clauses, found " + std::to_string(f.clauses.size()));
  return f;
}

void FactoringInstance::validate() const {
  if (factor_bits < 1 || factor_bits > 16)
    throw std::invalid_argument("factoring: factor_bits must be in [1, 16]");
  if (modulus < 3 || bit_length(modulus) > 2 * factor_bits)
    throw std::invalid_argument("factoring: need 3 <= modulus < 2^(2*factor_bits)");
}

ReversibleCircuit build_sat_verifier(const CnfFormula& formula, int max_wires) {
  formula.validate();
  std::vector<std::vector<int>> clauses;
  for (const auto& c : formula.clauses)
    if (auto n = normalize_clause(c)) clauses.push_back(std::move(*n));

  const int v = formula.num_vars;
  std::vector<int> inputs(static_cast<std::size_t>(v));
  for (int i = 0; i < v; ++i) inputs[static_cast<std::size_t>(i)] = 1 + i;
  Builder b(1 + v, max_wires);
  const auto var_wire = [](int lit) { return std::abs(lit); };

  if (clauses.empty()) {
    b.x(0);
    return b.finish(std::move(inputs), "SAT verifier");
  }

  std::vector<int> flags;
  for (const auto& clause : clauses) {
    const int flag = clauses.size() == 1 ? 0 : b.fresh();
    // OR(l) = NOT AND(NOT l): flip positive literals so each wire holds NOT l.
    std::vector<int> wires;
    for (int l : clause) {
      if (l > 0) b.x(var_wire(l));
      wires.push_back(var_wire(l));
    }
    b.and_into(wires, flag);
    b.x(flag);
    for (int l : clause)
      if (l > 0) b.x(var_wire(l));
    flags.push_back(flag);
  }
  if (flags.size() > 1) b.and_into(flags, 0);
  return b.finish(std::move(inputs), "SAT verifier");
}

ReversibleCircuit build_factoring_verifier(const FactoringInstance& inst, int max_wires) {
  inst.validate();
  const int w = inst.factor_bits;
  const int n = 2 * w;
  // p_j, q_j: bit j (LSB = 0). Inputs listed MSB first.
  const auto p = [w](int j) { return 1 + (w - 1 - j); };
  const auto q = [w](int j) { return 1 + w + (w - 1 - j); };
  std::vector<int> inputs;
  for (int i = 1; i <= n; ++i) inputs.push_back(i);

  Builder b(1 + n, max_wires);
  std::vector<int> r(static_cast<std::size_t>(n));
  for (auto& x : r) x = b.fresh();
  std::vector<int> pp(static_cast<std::size_t>(w));
  if (w > 1)
    for (auto& x : pp) x = b.fresh();

  // Shift-and-add multiply into r. Row 0 lands directly in the zero register.
  for (int j = 0; j < w; ++j) b.ccx(p(j), q(0), r[static_cast<std::size_t>(j)]);
  for (int i = 1; i < w; ++i) {
    for (int j = 0; j < w; ++j) b.ccx(p(j), q(i), pp[static_cast<std::size_t>(j)]);
    int carry = -1;
    for (int j = 0; j < w; ++j) {
      const int rk = r[static_cast<std::size_t>(i + j)];
      const int a = pp[static_cast<std::size_t>(j)];
      const int cout = j == w - 1 ? r[static_cast<std::size_t>(i + w)] : b.fresh();
      // cout ^= MAJ(rk, a, carry), then rk ^= a ^ carry.
      b.ccx(rk, a, cout);
      if (carry >= 0) {
        b.ccx(rk, carry, cout);
        b.ccx(a, carry, cout);
      }
      b.cx(a, rk);
      if (carry >= 0) b.cx(carry, rk);
      carry = cout;
    }
    for (int j = 0; j < w; ++j) b.ccx(p(j), q(i), pp[static_cast<std::size_t>(j)]);
  }

  std::vector<int> conditions;
  // r == modulus: complement the bits where the modulus has a zero.
  for (int k = 0; k < n; ++k) {
    if (((inst.modulus >> k) & 1u) == 0) b.x(r[static_cast<std::size_t>(k)]);
    conditions.push_back(r[static_cast<std::size_t>(k)]);
  }

  // p > 1  <=>  OR(p_1 .. p_{w-1}).
  if (w == 1) {
    conditions.push_back(b.fresh());  // never set: p > 1 is impossible
  } else if (w == 2) {
    conditions.push_back(p(1));
  } else {
    const int flag = b.fresh();
    std::vector<int> high;
    for (int j = 1; j < w; ++j) {
      b.x(p(j));
      high.push_back(p(j));
    }
    b.and_into(high, flag);
    b.x(flag);
    for (int j = 1; j < w; ++j) b.x(p(j));
    conditions.push_back(flag);
  }

  // p <= q  <=>  no borrow out of q - p. borrow' = MAJ(NOT q_j, p_j, borrow).
  for (int j = 0; j < w; ++j) b.x(q(j));
  int borrow = -1;
  for (int j = 0; j < w; ++j) {
    const int out = b.fresh();
    b.ccx(q(j), p(j), out);
    if (borrow >= 0) {
      b.ccx(q(j), borrow, out);
      b.ccx(p(j), borrow, out);
    }
    borrow = out;
  }
  for (int j = 0; j < w; ++j) b.x(q(j));
  b.x(borrow);
  conditions.push_back(borrow);

  b.and_into(conditions, 0);
  return b.finish(std::move(inputs), "factoring verifier");
}

std::pair<std::uint64_t, std::uint64_t> decode_factors(const BitString& inputs,
                                                       int factor_bits) {
  if (inputs.size() != static_cast<std::size_t>(2 * factor_bits))
    throw std::invalid_argument("decode_factors: expected 2 * factor_bits input bits");
  std::uint64_t p = 0, q = 0;
  for (int i = 0; i < factor_bits; ++i) {
    p = (p << 1) | inputs[static_cast<std::size_t>(i)];
    q = (q << 1) | inputs[static_cast<std::size_t>(factor_bits + i)];
  }
  return {p, q};
}

std::vector<BitString> enumerate_accepting(const ReversibleCircuit& circuit, int max_inputs) {
  const auto& inputs = circuit.input_wires();
  const int k = static_cast<int>(inputs.size());
  if (k > max_inputs)
    throw BudgetError("accepting-input enumeration 2^k", std::uint64_t{1} << k,
                      std::uint64_t{1} << max_inputs);
  const int m = circuit.num_wires();
  const std::uint64_t out_mask = wire_mask(m, circuit.output_wire());
  std::vector<BitString> accepted;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
    std::uint64_t state = 0;
    for (int i = 0; i < k; ++i)
      if ((a >> (k - 1 - i)) & 1u) state |= wire_mask(m, inputs[static_cast<std::size_t>(i)]);
    if (simulate_classical(circuit, state, circuit.num_gates()) & out_mask)
      accepted.push_back(BitString::from_index(a, static_cast<std::size_t>(k)));
  }
  return accepted;
}

InstanceMeta describe(const CnfFormula& formula, const ReversibleCircuit& circuit) {
  InstanceMeta meta;
  // Each literal: variable index plus a sign bit.
  const auto per_literal = static_cast<std::uint64_t>(bit_length(
                               static_cast<std::uint64_t>(std::max(formula.num_vars, 1)))) + 1;
  for (const auto& c : formula.clauses) meta.problem_size += per_literal * c.size();
  if (circuit.input_wires().size() <= 16)
    meta.num_accepting = enumerate_accepting(circuit).size();
  return meta;
}

InstanceMeta describe(const FactoringInstance& inst, const ReversibleCircuit& circuit) {
  InstanceMeta meta;
  meta.problem_size = static_cast<std::uint64_t>(bit_length(inst.modulus));
  if (circuit.input_wires().size() <= 16)
    meta.num_accepting = enumerate_accepting(circuit).size();
  return meta;
}

}  // namespace clockmps
