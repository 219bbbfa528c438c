#include "clockmps/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "clockmps/errors.hpp"

namespace clockmps {

namespace {

constexpr double kUnitaryTol = 1e-12;

bool is_unitary(const Eigen::MatrixXcd& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <=
         kUnitaryTol;
}

void check_distinct(const std::vector<int>& wires) {
  for (std::size_t i = 0; i < wires.size(); ++i)
    for (std::size_t j = i + 1; j < wires.size(); ++j)
      if (wires[i] == wires[j]) throw std::invalid_argument("duplicate wire");
  for (int w : wires)
    if (w < 0) throw std::invalid_argument("negative wire index");
}

// Local basis index of basis state x restricted to the gate wires.
std::uint32_t local_index(std::span<const int> wires, std::uint64_t x, int m) {
  std::uint32_t j = 0;
  for (int w : wires) j = (j << 1) | ((x & wire_mask(m, w)) ? 1u : 0u);
  return j;
}

std::uint64_t with_local(std::span<const int> wires, std::uint64_t x, int m,
                         std::uint32_t i) {
  const auto k = wires.size();
  for (std::size_t p = 0; p < k; ++p) {
    const std::uint64_t mask = wire_mask(m, wires[p]);
    if ((i >> (k - 1 - p)) & 1u)
      x |= mask;
    else
      x &= ~mask;
  }
  return x;
}

}  // namespace

std::string_view gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::Not:
      return "NOT";
    case GateKind::Cnot:
      return "CNOT";
    case GateKind::Toffoli:
      return "TOFFOLI";
    case GateKind::Unitary1:
      return "U1";
    case GateKind::Unitary2:
      return "U2";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Gate

Gate::Gate(GateKind kind, std::vector<int> wires, Eigen::MatrixXcd matrix)
    : kind_(kind), wires_(std::move(wires)), matrix_(std::move(matrix)) {
  check_distinct(wires_);
  if (!matrix_.size()) return;
  if (matrix_.rows() != (1 << wires_.size()) || matrix_.cols() != matrix_.rows())
    throw std::invalid_argument("gate matrix has wrong dimension");
  if (!is_unitary(matrix_)) throw std::invalid_argument("gate matrix is not unitary");
}

Gate Gate::not_gate(int target) { return Gate(GateKind::Not, {target}, {}); }

Gate Gate::cnot(int control, int target) {
  return Gate(GateKind::Cnot, {control, target}, {});
}

Gate Gate::toffoli(int control1, int control2, int target) {
  return Gate(GateKind::Toffoli, {control1, control2, target}, {});
}

Gate Gate::unitary1(int wire, const Eigen::Matrix2cd& u) {
  return Gate(GateKind::Unitary1, {wire}, u);
}

Gate Gate::unitary2(int wire_a, int wire_b, const Eigen::Matrix4cd& u) {
  return Gate(GateKind::Unitary2, {wire_a, wire_b}, u);
}

Eigen::MatrixXcd Gate::local_matrix() const {
  if (!is_classical()) return matrix_;
  const int dim = 1 << wires_.size();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    int i = j;
    if (kind_ == GateKind::Not) i = j ^ 1;
    if (kind_ == GateKind::Cnot && (j & 2)) i = j ^ 1;
    if (kind_ == GateKind::Toffoli && (j & 6) == 6) i = j ^ 1;
    p(i, j) = 1.0;
  }
  return p;
}

Gate Gate::inverse() const {
  if (is_classical()) return *this;
  return Gate(kind_, wires_, matrix_.adjoint());
}

std::uint64_t Gate::apply_classical(std::uint64_t state, int num_wires) const {
  const auto bit = [&](int w) { return (state & wire_mask(num_wires, w)) != 0; };
  switch (kind_) {
    case GateKind::Not:
      return state ^ wire_mask(num_wires, wires_[0]);
    case GateKind::Cnot:
      return bit(wires_[0]) ? state ^ wire_mask(num_wires, wires_[1]) : state;
    case GateKind::Toffoli:
      return bit(wires_[0]) && bit(wires_[1]) ? state ^ wire_mask(num_wires, wires_[2])
                                              : state;
    default:
      throw std::logic_error("apply_classical: gate is not classical");
  }
}

void Gate::column(std::uint64_t x, int num_wires,
                  std::vector<std::pair<std::uint64_t, Complex>>& out) const {
  out.clear();
  if (is_classical()) {
    out.emplace_back(apply_classical(x, num_wires), Complex{1.0, 0.0});
    return;
  }
  const std::uint32_t j = local_index(wires_, x, num_wires);
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
    const Complex a = matrix_(i, j);
    if (a != Complex{0.0, 0.0})
      out.emplace_back(with_local(wires_, x, num_wires, static_cast<std::uint32_t>(i)), a);
  }
}

bool Gate::operator==(const Gate& other) const {
  if (kind_ != other.kind_ || wires_ != other.wires_) return false;
  if (matrix_.size() != other.matrix_.size()) return false;
  return matrix_.size() == 0 || matrix_ == other.matrix_;
}

// ---------------------------------------------------------------------------
// BitString

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_)
    if (b > 1) throw std::invalid_argument("BitString: bits must be 0 or 1");
}

BitString BitString::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("BitString: expected only '0' and '1'");
    bits.push_back(c == '1');
  }
  return BitString(std::move(bits));
}

BitString BitString::from_index(std::uint64_t index, std::size_t length) {
  BitString b(length);
  for (std::size_t i = 0; i < length; ++i) b.bits_[i] = (index >> (length - 1 - i)) & 1u;
  return b;
}

std::uint64_t BitString::to_index() const {
  if (bits_.size() > 64) throw std::length_error("BitString: more than 64 bits");
  std::uint64_t v = 0;
  for (auto b : bits_) v = (v << 1) | b;
  return v;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

// ---------------------------------------------------------------------------
// ReversibleCircuit

ReversibleCircuit::ReversibleCircuit(int num_wires, std::vector<int> input_wires,
                                     int output_wire, std::vector<Gate> gates)
    : num_wires_(num_wires),
      input_wires_(std::move(input_wires)),
      output_wire_(output_wire),
      gates_(std::move(gates)) {
  if (num_wires_ < 1) throw std::invalid_argument("circuit needs at least one wire");
  if (gates_.empty()) throw std::invalid_argument("circuit needs at least one gate");
  if (num_wires_ > 64) throw std::invalid_argument("circuit wider than 64 wires");
  check_distinct(input_wires_);
  std::vector<bool> is_input(static_cast<std::size_t>(num_wires_), false);
  for (int w : input_wires_) {
    if (w >= num_wires_) throw std::invalid_argument("input wire out of range");
    is_input[static_cast<std::size_t>(w)] = true;
  }
  for (int w = 0; w < num_wires_; ++w)
    if (!is_input[static_cast<std::size_t>(w)]) ancilla_wires_.push_back(w);
  if (output_wire_ < 0 || output_wire_ >= num_wires_)
    throw std::invalid_argument("output wire out of range");
  for (const auto& g : gates_)
    for (int w : g.wires())
      if (w >= num_wires_) throw std::invalid_argument("gate wire out of range");
}

bool ReversibleCircuit::is_classical() const {
  return std::all_of(gates_.begin(), gates_.end(),
                     [](const Gate& g) { return g.is_classical(); });
}

ReversibleCircuit ReversibleCircuit::inverse() const {
  std::vector<Gate> inv;
  inv.reserve(gates_.size());
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) inv.push_back(it->inverse());
  return ReversibleCircuit(num_wires_, input_wires_, output_wire_, std::move(inv));
}

BitString ReversibleCircuit::embed_input(const BitString& inputs) const {
  if (inputs.size() != input_wires_.size())
    throw std::invalid_argument("embed_input: expected " +
                                std::to_string(input_wires_.size()) + " input bits");
  BitString full(static_cast<std::size_t>(num_wires_));
  for (std::size_t i = 0; i < input_wires_.size(); ++i)
    full.set(static_cast<std::size_t>(input_wires_[i]), inputs[i]);
  return full;
}

BitString ReversibleCircuit::restrict_to_inputs(const BitString& full) const {
  BitString in(input_wires_.size());
  for (std::size_t i = 0; i < input_wires_.size(); ++i)
    in.set(i, full[static_cast<std::size_t>(input_wires_[i])]);
  return in;
}

int ReversibleCircuit::wrong_ancillas(const BitString& full) const {
  int a = 0;
  for (int w : ancilla_wires_) a += full[static_cast<std::size_t>(w)];
  return a;
}

bool ReversibleCircuit::operator==(const ReversibleCircuit& other) const {
  return num_wires_ == other.num_wires_ && input_wires_ == other.input_wires_ &&
         output_wire_ == other.output_wire_ && gates_ == other.gates_;
}

// ---------------------------------------------------------------------------
// Simulation

std::uint64_t simulate_classical(const ReversibleCircuit& circuit,
                                 std::uint64_t input, std::size_t upto) {
  if (upto > circuit.num_gates())
    throw std::out_of_range("simulate_classical: prefix longer than circuit");
  const int m = circuit.num_wires();
  for (std::size_t t = 0; t < upto; ++t) {
    const Gate& g = circuit.gates()[t];
    if (!g.is_classical())
      throw std::invalid_argument("simulate_classical: circuit contains a non-classical gate");
    input = g.apply_classical(input, m);
  }
  return input;
}

BitString simulate_classical(const ReversibleCircuit& circuit,
                             const BitString& input, std::size_t upto) {
  const auto m = static_cast<std::size_t>(circuit.num_wires());
  if (input.size() != m)
    throw std::invalid_argument("simulate_classical: input has " +
                                std::to_string(input.size()) + " bits, circuit has " +
                                std::to_string(m) + " wires");
  return BitString::from_index(simulate_classical(circuit, input.to_index(), upto), m);
}

void apply_gate(const Gate& gate, int num_wires, Eigen::VectorXcd& state) {
  const auto dim = static_cast<std::uint64_t>(state.size());
  if (gate.is_classical()) {
    Eigen::VectorXcd out(state.size());
    for (std::uint64_t x = 0; x < dim; ++x)
      out[static_cast<Eigen::Index>(gate.apply_classical(x, num_wires))] =
          state[static_cast<Eigen::Index>(x)];
    state.swap(out);
    return;
  }
  const auto wires = gate.wires();
  const Eigen::MatrixXcd& u = gate.matrix();
  const auto k = static_cast<std::uint32_t>(u.rows());
  std::uint64_t gate_bits = 0;
  for (int w : wires) gate_bits |= wire_mask(num_wires, w);
  Eigen::VectorXcd local(k);
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & gate_bits) continue;
    for (std::uint32_t j = 0; j < k; ++j)
      local[j] = state[static_cast<Eigen::Index>(with_local(wires, base, num_wires, j))];
    const Eigen::VectorXcd mapped = u * local;
    for (std::uint32_t i = 0; i < k; ++i)
      state[static_cast<Eigen::Index>(with_local(wires, base, num_wires, i))] = mapped[i];
  }
}

Eigen::VectorXcd simulate_statevector(const ReversibleCircuit& circuit,
                                      const BitString& input, std::size_t upto,
                                      int max_wires) {
  const int m = circuit.num_wires();
  if (m > max_wires)
    throw BudgetError("statevector dimension 2^M", std::uint64_t{1} << m,
                      std::uint64_t{1} << max_wires);
  if (input.size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("simulate_statevector: input length mismatch");
  if (upto > circuit.num_gates())
    throw std::out_of_range("simulate_statevector: prefix longer than circuit");
  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(Eigen::Index{1} << m);
  state[static_cast<Eigen::Index>(input.to_index())] = 1.0;
  for (std::size_t t = 0; t < upto; ++t) apply_gate(circuit.gates()[t], m, state);
  return state;
}

Eigen::MatrixXcd circuit_unitary(const ReversibleCircuit& circuit, int max_wires) {
  const int m = circuit.num_wires();
  if (m > max_wires)
    throw BudgetError("dense circuit unitary 2^M", std::uint64_t{1} << m,
                      std::uint64_t{1} << max_wires);
  const Eigen::Index dim = Eigen::Index{1} << m;
  Eigen::MatrixXcd u(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    Eigen::VectorXcd col = Eigen::VectorXcd::Zero(dim);
    col[x] = 1.0;
    for (const auto& g : circuit.gates()) apply_gate(g, m, col);
    u.col(x) = col;
  }
  return u;
}

// ---------------------------------------------------------------------------
// Toffoli decomposition

std::vector<Gate> toffoli_sequence(int c1, int c2, int t) {
  const double r = std::numbers::sqrt2 / 2.0;
  Eigen::Matrix2cd h;
  h << r, r, r, -r;
  const Complex phase = std::polar(1.0, std::numbers::pi / 4.0);
  Eigen::Matrix2cd tg = Eigen::Matrix2cd::Zero();
  tg(0, 0) = 1.0;
  tg(1, 1) = phase;
  const Eigen::Matrix2cd tdg = tg.adjoint();
  return {
      Gate::unitary1(t, h),    Gate::cnot(c2, t),       Gate::unitary1(t, tdg),
      Gate::cnot(c1, t),       Gate::unitary1(t, tg),   Gate::cnot(c2, t),
      Gate::unitary1(t, tdg),  Gate::cnot(c1, t),       Gate::unitary1(c2, tg),
      Gate::unitary1(t, tg),   Gate::unitary1(t, h),    Gate::cnot(c1, c2),
      Gate::unitary1(c1, tg),  Gate::unitary1(c2, tdg), Gate::cnot(c1, c2),
  };
}

ReversibleCircuit decompose_toffoli(const ReversibleCircuit& circuit) {
  std::vector<Gate> out;
  out.reserve(circuit.num_gates());
  for (const auto& g : circuit.gates()) {
    if (g.kind() != GateKind::Toffoli) {
      out.push_back(g);
      continue;
    }
    const auto w = g.wires();
    for (auto& s : toffoli_sequence(w[0], w[1], w[2])) out.push_back(std::move(s));
  }
  return ReversibleCircuit(circuit.num_wires(), circuit.input_wires(),
                           circuit.output_wire(), std::move(out));
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(std::string_view tok, int line) {
  int v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(line, "expected integer, got '" + std::string(tok) + "'");
  return v;
}

double parse_real(std::string_view tok, int line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(line, "expected number, got '" + std::string(tok) + "'");
  return v;
}

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ReversibleCircuit parse_circuit(std::string_view text) {
  int num_wires = -1;
  std::vector<int> inputs;
  bool have_inputs = false;
  int output = 0;
  bool have_output = false;
  std::vector<Gate> gates;

  auto check_wire = [&](int w, int line) {
    if (num_wires < 0) throw ParseError(line, "gate before 'wires' declaration");
    if (w < 0 || w >= num_wires)
      throw ParseError(line, "wire index " + std::to_string(w) + " out of range [0, " +
                                 std::to_string(num_wires) + ")");
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string_view key = tok[0];
    const auto nargs = tok.size() - 1;
    auto expect_args = [&](std::size_t n) {
      if (nargs != n)
        throw ParseError(line_no, std::string(key) + " expects " + std::to_string(n) +
                                      " arguments, got " + std::to_string(nargs));
    };

    if (key == "wires") {
      expect_args(1);
      if (num_wires >= 0) throw ParseError(line_no, "duplicate 'wires' declaration");
      num_wires = parse_int(tok[1], line_no);
      if (num_wires < 1 || num_wires > 64)
        throw ParseError(line_no, "wire count must be in [1, 64]");
    } else if (key == "inputs") {
      if (have_inputs) throw ParseError(line_no, "duplicate 'inputs' declaration");
      have_inputs = true;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const int w = parse_int(tok[i], line_no);
        check_wire(w, line_no);
        if (std::find(inputs.begin(), inputs.end(), w) != inputs.end())
          throw ParseError(line_no, "duplicate wire " + std::to_string(w));
        inputs.push_back(w);
      }
    } else if (key == "output") {
      expect_args(1);
      if (have_output) throw ParseError(line_no, "duplicate 'output' declaration");
      have_output = true;
      output = parse_int(tok[1], line_no);
      check_wire(output, line_no);
    } else if (key == "NOT" || key == "CNOT" || key == "TOFFOLI" || key == "U1" ||
               key == "U2") {
      const std::size_t arity = key == "NOT" || key == "U1" ? 1 : key == "TOFFOLI" ? 3 : 2;
      const std::size_t nmat = key == "U1" ? 8 : key == "U2" ? 32 : 0;
      expect_args(arity + nmat);
      std::vector<int> w;
      for (std::size_t i = 0; i < arity; ++i) w.push_back(parse_int(tok[1 + i], line_no));
      for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j)
          if (w[i] == w[j]) throw ParseError(line_no, "duplicate wire " + std::to_string(w[i]));
      for (int x : w) check_wire(x, line_no);
      try {
        if (key == "NOT") {
          gates.push_back(Gate::not_gate(w[0]));
        } else if (key == "CNOT") {
          gates.push_back(Gate::cnot(w[0], w[1]));
        } else if (key == "TOFFOLI") {
          gates.push_back(Gate::toffoli(w[0], w[1], w[2]));
        } else {
          const int dim = key == "U1" ? 2 : 4;
          Eigen::MatrixXcd u(dim, dim);
          for (int e = 0; e < dim * dim; ++e) {
            const auto base = 1 + arity + 2 * static_cast<std::size_t>(e);
            u(e / dim, e % dim) = Complex(parse_real(tok[base], line_no),
                                          parse_real(tok[base + 1], line_no));
          }
          if (key == "U1")
            gates.push_back(Gate::unitary1(w[0], u));
          else
            gates.push_back(Gate::unitary2(w[0], w[1], u));
        }
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
      }
    } else {
      throw ParseError(line_no, "unknown directive '" + std::string(key) + "'");
    }
  }
  if (num_wires < 0) throw ParseError(0, "missing 'wires' declaration");
  if (!have_output) throw ParseError(0, "missing 'output' declaration");
  if (gates.empty()) throw ParseError(0, "circuit has no gates");
  try {
    return ReversibleCircuit(num_wires, std::move(inputs), output, std::move(gates));
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize_circuit(const ReversibleCircuit& circuit) {
  std::ostringstream os;
  os << "wires " << circuit.num_wires() << "\n";
  os << "inputs";
  for (int w : circuit.input_wires()) os << ' ' << w;
  os << "\noutput " << circuit.output_wire() << "\n";
  for (const auto& g : circuit.gates()) {
    os << gate_kind_name(g.kind());
    for (int w : g.wires()) os << ' ' << w;
    if (!g.is_classical()) {
      const auto& u = g.matrix();
      for (Eigen::Index r = 0; r < u.rows(); ++r)
        for (Eigen::Index c = 0; c < u.cols(); ++c)
          os << ' ' << fmt_real(u(r, c).real()) << ' ' << fmt_real(u(r, c).imag());
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace clockmps
