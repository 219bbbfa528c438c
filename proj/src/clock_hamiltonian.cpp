#include "clockmps/clock_hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <type_traits>
#include <unordered_map>

#include "clockmps/errors.hpp"

namespace clockmps {

std::string_view term_kind_name(TermKind kind) {
  switch (kind) {
    case TermKind::Init: return "INIT";
    case TermKind::Evol: return "EVOL";
    case TermKind::Final: return "FINAL";
  }
  return "?";
}

namespace {

std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

template <typename Scalar>
Scalar narrow(Complex c) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return c.real();
  } else {
    return c;
  }
}

template <typename Scalar>
void require_real_ok(const ClockHamiltonian& h, const char* what) {
  if constexpr (std::is_same_v<Scalar, double>) {
    if (!h.is_real())
      throw std::invalid_argument(std::string(what) + ": real storage needs a classical circuit");
  }
}

std::uint64_t checked_dim(const ClockHamiltonian& h, std::uint64_t max_dim) {
  const std::uint64_t d = h.dim();
  if (d > max_dim) throw BudgetError("clock Hamiltonian dimension", d, max_dim);
  return d;
}

}  // namespace

ClockHamiltonian::ClockHamiltonian(ReversibleCircuit circuit, std::optional<double> init_weight)
    : circuit_(std::move(circuit)),
      init_weight_(init_weight.value_or(static_cast<double>(circuit_.num_gates()))) {
  if (!(init_weight_ >= 0.0)) throw std::invalid_argument("init weight must be >= 0");
  for (int a : circuit_.ancilla_wires()) terms_.push_back({TermKind::Init, 0, {a}, init_weight_});
  for (std::size_t s = 1; s <= num_steps(); ++s) {
    const Gate& g = circuit_.gates()[s - 1];
    terms_.push_back({TermKind::Evol, s, {g.wires().begin(), g.wires().end()}, 1.0});
    inverse_gates_.push_back(g.inverse());
  }
  terms_.push_back({TermKind::Final, num_steps(), {circuit_.output_wire()}, 1.0});
}

std::uint64_t ClockHamiltonian::dim() const {
  const int m = num_wires();
  const std::uint64_t td = time_dim();
  if (m >= 64 || td > (std::numeric_limits<std::uint64_t>::max() >> m))
    return std::numeric_limits<std::uint64_t>::max();
  return td << m;
}

void ClockHamiltonian::term_column(const HamiltonianTerm& term, std::uint64_t x, std::size_t t,
                                   std::vector<std::pair<std::uint64_t, Complex>>& out) const {
  const int m = num_wires();
  switch (term.kind) {
    case TermKind::Init:
      if (t == 0 && (x & wire_mask(m, term.wires[0]))) out.emplace_back(index(x, 0), term.weight);
      return;
    case TermKind::Final:
      if (t == num_steps() && !(x & wire_mask(m, term.wires[0])))
        out.emplace_back(index(x, t), term.weight);
      return;
    case TermKind::Evol: {
      const std::size_t s = term.t;
      if (t + 1 != s && t != s) return;
      out.emplace_back(index(x, t), term.weight);
      const bool forward = t + 1 == s;
      const Gate& g = forward ? circuit_.gates()[s - 1] : inverse_gates_[s - 1];
      const std::size_t target = forward ? s : s - 1;
      if (g.is_classical()) {
        out.emplace_back(index(g.apply_classical(x, m), target), -term.weight);
      } else {
        std::vector<std::pair<std::uint64_t, Complex>> col;
        g.column(x, m, col);
        for (const auto& [y, amp] : col) out.emplace_back(index(y, target), -term.weight * amp);
      }
      return;
    }
  }
}

void ClockHamiltonian::column(std::uint64_t x, std::size_t t,
                              std::vector<std::pair<std::uint64_t, Complex>>& out) const {
  const std::size_t n_init = circuit_.ancilla_wires().size();
  if (t == 0)
    for (std::size_t k = 0; k < n_init; ++k) term_column(terms_[k], x, t, out);
  if (t >= 1) term_column(terms_[n_init + t - 1], x, t, out);
  if (t + 1 <= num_steps()) term_column(terms_[n_init + t], x, t, out);
  if (t == num_steps()) term_column(terms_.back(), x, t, out);
}

template <typename Scalar>
SparseMatrix<Scalar> ClockHamiltonian::assemble(std::uint64_t max_dim) const {
  require_real_ok<Scalar>(*this, "assemble");
  const std::uint64_t d = checked_dim(*this, max_dim);
  const std::uint64_t dd = data_dim();
  std::vector<std::pair<std::uint64_t, Complex>> col;
  // Hermitian: row r is the conjugate of column r.
  return SparseMatrix<Scalar>::from_rows(
      static_cast<std::int64_t>(d), static_cast<std::int64_t>(d),
      [&](std::int64_t r, typename SparseMatrix<Scalar>::RowEntries& row) {
        col.clear();
        const auto ru = static_cast<std::uint64_t>(r);
        column(ru % dd, ru / dd, col);
        for (const auto& [c, v] : col)
          row.emplace_back(static_cast<std::int64_t>(c), narrow<Scalar>(std::conj(v)));
      });
}

template <typename Scalar>
SparseMatrix<Scalar> ClockHamiltonian::assemble_term(const HamiltonianTerm& term,
                                                     std::uint64_t max_dim) const {
  require_real_ok<Scalar>(*this, "assemble_term");
  const std::uint64_t d = checked_dim(*this, max_dim);
  const std::uint64_t dd = data_dim();
  std::vector<std::pair<std::uint64_t, Complex>> col;
  return SparseMatrix<Scalar>::from_rows(
      static_cast<std::int64_t>(d), static_cast<std::int64_t>(d),
      [&](std::int64_t r, typename SparseMatrix<Scalar>::RowEntries& row) {
        col.clear();
        const auto ru = static_cast<std::uint64_t>(r);
        term_column(term, ru % dd, ru / dd, col);
        for (const auto& [c, v] : col)
          row.emplace_back(static_cast<std::int64_t>(c), narrow<Scalar>(std::conj(v)));
      });
}

template SparseMatrix<double> ClockHamiltonian::assemble<double>(std::uint64_t) const;
template SparseMatrix<Complex> ClockHamiltonian::assemble<Complex>(std::uint64_t) const;
template SparseMatrix<double> ClockHamiltonian::assemble_term<double>(const HamiltonianTerm&,
                                                                      std::uint64_t) const;
template SparseMatrix<Complex> ClockHamiltonian::assemble_term<Complex>(const HamiltonianTerm&,
                                                                        std::uint64_t) const;

template <typename Scalar>
std::optional<std::int64_t> ClockSector<Scalar>::find(std::uint64_t index) const {
  const auto it = std::lower_bound(basis.begin(), basis.end(), index);
  if (it == basis.end() || *it != index) return std::nullopt;
  return static_cast<std::int64_t>(it - basis.begin());
}

template <typename Scalar>
Vector<Scalar> ClockSector<Scalar>::embed(const Vector<Scalar>& v, std::uint64_t full_dim) const {
  if (v.size() != static_cast<Index>(basis.size()))
    throw std::invalid_argument("sector embed: length mismatch");
  if (!basis.empty() && basis.back() >= full_dim)
    throw std::invalid_argument("sector embed: full dimension too small");
  Vector<Scalar> out = Vector<Scalar>::Zero(static_cast<Index>(full_dim));
  for (std::size_t k = 0; k < basis.size(); ++k)
    out[static_cast<Index>(basis[k])] = v[static_cast<Index>(k)];
  return out;
}

template <typename Scalar>
ClockSector<Scalar> assemble_sector(const ClockHamiltonian& h, std::span<const std::uint64_t> seeds,
                                    std::uint64_t max_dim) {
  require_real_ok<Scalar>(h, "assemble_sector");
  const std::uint64_t dd = h.data_dim();
  std::unordered_map<std::uint64_t, std::int64_t> seen;
  std::deque<std::uint64_t> queue;
  for (std::uint64_t s : seeds) {
    if (s / dd > h.num_steps()) throw std::invalid_argument("sector seed out of range");
    if (seen.emplace(s, 0).second) queue.push_back(s);
  }
  std::vector<std::pair<std::uint64_t, Complex>> col;
  while (!queue.empty()) {
    const std::uint64_t i = queue.front();
    queue.pop_front();
    col.clear();
    h.column(i % dd, i / dd, col);
    for (const auto& [r, v] : col) {
      if (v == Complex(0.0) || !seen.emplace(r, 0).second) continue;
      if (seen.size() > max_dim) throw BudgetError("sector dimension", seen.size(), max_dim);
      queue.push_back(r);
    }
  }
  ClockSector<Scalar> sector;
  sector.basis.reserve(seen.size());
  for (const auto& kv : seen) sector.basis.push_back(kv.first);
  std::sort(sector.basis.begin(), sector.basis.end());
  for (std::size_t k = 0; k < sector.basis.size(); ++k)
    seen[sector.basis[k]] = static_cast<std::int64_t>(k);
  const auto n = static_cast<std::int64_t>(sector.basis.size());
  sector.matrix = SparseMatrix<Scalar>::from_rows(
      n, n, [&](std::int64_t r, typename SparseMatrix<Scalar>::RowEntries& row) {
        col.clear();
        const std::uint64_t g = sector.basis[static_cast<std::size_t>(r)];
        h.column(g % dd, g / dd, col);
        for (const auto& [c, v] : col) {
          if (v == Complex(0.0)) continue;
          row.emplace_back(seen.at(c), narrow<Scalar>(std::conj(v)));
        }
      });
  return sector;
}

std::vector<std::uint64_t> valid_input_seeds(const ClockHamiltonian& h, int max_inputs) {
  const auto& circuit = h.circuit();
  const int k = static_cast<int>(circuit.input_wires().size());
  if (k > max_inputs) throw BudgetError("input assignments (bits)", static_cast<std::uint64_t>(k),
                                        static_cast<std::uint64_t>(max_inputs));
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
    const BitString full = circuit.embed_input(BitString::from_index(a, static_cast<std::size_t>(k)));
    seeds.push_back(h.index(full.to_index(), 0));
  }
  return seeds;
}

double block_leakage(const ClockHamiltonian& h, const BitString& full_input) {
  const auto& circuit = h.circuit();
  if (!circuit.is_classical()) throw std::invalid_argument("block_leakage: classical circuits only");
  if (full_input.size() != static_cast<std::size_t>(circuit.num_wires()))
    throw std::invalid_argument("block_leakage: register length mismatch");
  const std::size_t T = h.num_steps();
  std::vector<std::uint64_t> members;
  std::uint64_t x = full_input.to_index();
  for (std::size_t t = 0; t <= T; ++t) {
    members.push_back(h.index(x, t));
    if (t < T) x = circuit.gates()[t].apply_classical(x, circuit.num_wires());
  }
  std::vector<std::uint64_t> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  double leak = 0.0;
  std::vector<std::pair<std::uint64_t, Complex>> col;
  for (std::uint64_t i : members) {
    col.clear();
    h.column(i % h.data_dim(), i / h.data_dim(), col);
    for (const auto& [r, v] : col)
      if (!std::binary_search(sorted.begin(), sorted.end(), r)) leak = std::max(leak, std::abs(v));
  }
  return leak;
}

HistoryBasis build_history_basis(const ReversibleCircuit& circuit, const BitString& full_input) {
  if (full_input.size() != static_cast<std::size_t>(circuit.num_wires()))
    throw std::invalid_argument("history basis: register length mismatch");
  HistoryBasis basis;
  basis.input = full_input;
  basis.classical = circuit.is_classical();
  const int m = circuit.num_wires();
  if (basis.classical) {
    std::uint64_t x = full_input.to_index();
    basis.classical_states.push_back(x);
    for (const Gate& g : circuit.gates()) {
      x = g.apply_classical(x, m);
      basis.classical_states.push_back(x);
    }
  } else {
    Eigen::VectorXcd v = simulate_statevector(circuit, full_input, 0);
    basis.states.push_back(v);
    for (const Gate& g : circuit.gates()) {
      apply_gate(g, m, v);
      basis.states.push_back(v);
    }
  }
  return basis;
}

HistoryState build_history_state(const ReversibleCircuit& circuit, const BitString& input,
                                 std::size_t level, bool allow_penalized,
                                 std::optional<double> init_weight) {
  const std::size_t M = static_cast<std::size_t>(circuit.num_wires());
  BitString full;
  if (input.size() == M) {
    full = input;
  } else if (input.size() == circuit.input_wires().size()) {
    full = circuit.embed_input(input);
  } else {
    throw std::invalid_argument("history state: input has " + std::to_string(input.size()) +
                                " bits, expected " + std::to_string(circuit.input_wires().size()) +
                                " or " + std::to_string(M));
  }
  const std::size_t T = circuit.num_gates();
  if (level > T) throw std::invalid_argument("history state: level exceeds T");

  HistoryState st;
  st.basis = build_history_basis(circuit, full);
  st.level = level;
  st.A = circuit.wrong_ancillas(full);
  const std::uint64_t out_mask = wire_mask(circuit.num_wires(), circuit.output_wire());
  if (st.basis.classical) {
    st.B = (st.basis.classical_states.back() & out_mask) ? 0 : 1;
  } else {
    double p1 = 0.0;
    const auto& last = st.basis.states.back();
    for (Index i = 0; i < last.size(); ++i)
      if (static_cast<std::uint64_t>(i) & out_mask) p1 += std::norm(last[i]);
    if (p1 >= 1.0 - 1e-9) st.B = 0;
    else if (p1 <= 1e-9) st.B = 1;
    else throw std::invalid_argument("history state: output is not deterministic (P(1) = " +
                                     std::to_string(p1) + ")");
  }

  if (st.A > 0) {
    if (!allow_penalized)
      throw std::invalid_argument("history state: input has " + std::to_string(st.A) +
                                  " wrongly initialized ancillas; not a closed-form eigenstate");
    const PenaltyProfile profile =
        PenaltyProfile::canonical(T, st.A, st.B, init_weight.value_or(static_cast<double>(T)));
    const SubspaceHamiltonian sub(profile);
    const std::vector<double> ev = numeric_eigenvalues(sub, level, 1);
    const Eigen::MatrixXd vec = tridiagonal_eigenvectors(sub.matrix(), ev);
    st.eigenvalue = ev[0];
    st.coefficients.assign(vec.data(), vec.data() + vec.rows());
    return st;
  }
  const AnalyticSpectrum spec(T, st.B ? SpectrumCase::A0B1 : SpectrumCase::A0B0);
  st.eigenvalue = spec.eigenvalue(level);
  st.normalization = spec.normalization(level);
  for (std::size_t t = 0; t <= T; ++t) st.coefficients.push_back(spec.coefficient(level, t));
  return st;
}

template <typename Scalar>
Vector<Scalar> history_vector(const HistoryState& state, int num_wires, std::uint64_t max_dim) {
  const std::uint64_t dd = std::uint64_t{1} << num_wires;
  const std::size_t steps = state.coefficients.size();
  if (dd * steps > max_dim) throw BudgetError("history vector dimension", dd * steps, max_dim);
  Vector<Scalar> v = Vector<Scalar>::Zero(static_cast<Index>(dd * steps));
  if (state.basis.classical) {
    for (std::size_t t = 0; t < steps; ++t)
      v[static_cast<Index>(t * dd + state.basis.classical_states[t])] = Scalar(state.coefficients[t]);
    return v;
  }
  if constexpr (std::is_same_v<Scalar, double>) {
    throw std::invalid_argument("history vector: complex amplitudes need complex storage");
  } else {
    for (std::size_t t = 0; t < steps; ++t)
      v.segment(static_cast<Index>(t * dd), static_cast<Index>(dd)) =
          state.coefficients[t] * state.basis.states[t];
    return v;
  }
}

template <typename Scalar>
double term_expectation(const ClockHamiltonian& h, const HamiltonianTerm& term,
                        const Vector<Scalar>& psi) {
  if (static_cast<std::uint64_t>(psi.size()) != h.dim())
    throw std::invalid_argument("term_expectation: vector length mismatch");
  const std::uint64_t dd = h.data_dim();
  std::vector<std::pair<std::uint64_t, Complex>> col;
  Complex acc = 0.0;
  for (Index i = 0; i < psi.size(); ++i) {
    if (psi[i] == Scalar(0)) continue;
    col.clear();
    h.term_column(term, static_cast<std::uint64_t>(i) % dd, static_cast<std::uint64_t>(i) / dd, col);
    for (const auto& [r, v] : col)
      acc += std::conj(Complex(psi[static_cast<Index>(r)])) * v * Complex(psi[i]);
  }
  return acc.real();
}

template Vector<double> history_vector<double>(const HistoryState&, int, std::uint64_t);
template Vector<Complex> history_vector<Complex>(const HistoryState&, int, std::uint64_t);
template double term_expectation<double>(const ClockHamiltonian&, const HamiltonianTerm&,
                                         const Vector<double>&);
template double term_expectation<Complex>(const ClockHamiltonian&, const HamiltonianTerm&,
                                          const Vector<Complex>&);

namespace {

// (wire, unit) with unit = 2 i + j for |i><j|, sorted by wire.
using ProductKey = std::vector<std::pair<int, int>>;
using TimeOp = std::map<std::pair<std::size_t, std::size_t>, Complex>;

}  // namespace

template <typename Scalar>
Mpo<Scalar> terms_to_mpo(const ClockHamiltonian& h, std::span<const HamiltonianTerm> terms,
                         const MpoBuildOptions& options) {
  require_real_ok<Scalar>(h, "hamiltonian_to_mpo");
  if (terms.empty()) throw std::invalid_argument("hamiltonian_to_mpo: no terms");
  const int M = h.num_wires();
  const std::size_t T = h.num_steps();
  std::map<ProductKey, TimeOp> products;
  for (const HamiltonianTerm& term : terms) {
    switch (term.kind) {
      case TermKind::Init:
        products[{{term.wires[0], 3}}][{0, 0}] += term.weight;
        break;
      case TermKind::Final:
        products[{{term.wires[0], 0}}][{T, T}] += term.weight;
        break;
      case TermKind::Evol: {
        const std::size_t s = term.t;
        auto& ident = products[{}];
        ident[{s - 1, s - 1}] += term.weight;
        ident[{s, s}] += term.weight;
        const Gate& g = h.circuit().gates()[s - 1];
        const Eigen::MatrixXcd u = g.local_matrix();
        const int k = g.arity();
        for (Index i = 0; i < u.rows(); ++i)
          for (Index j = 0; j < u.cols(); ++j) {
            const Complex c = u(i, j);
            if (c == Complex(0.0)) continue;
            ProductKey fwd, bwd;
            for (int p = 0; p < k; ++p) {
              const int bi = static_cast<int>((i >> (k - 1 - p)) & 1);
              const int bj = static_cast<int>((j >> (k - 1 - p)) & 1);
              fwd.emplace_back(g.wires()[static_cast<std::size_t>(p)], 2 * bi + bj);
              bwd.emplace_back(g.wires()[static_cast<std::size_t>(p)], 2 * bj + bi);
            }
            std::sort(fwd.begin(), fwd.end());
            std::sort(bwd.begin(), bwd.end());
            products[fwd][{s, s - 1}] += -term.weight * c;
            products[bwd][{s - 1, s}] += -term.weight * std::conj(c);
          }
        break;
      }
    }
  }

  const Index td = static_cast<Index>(T + 1);
  std::vector<MpoSite<Scalar>> sites;
  // Channels at each cut are the distinct remaining qubit-operator suffixes.
  std::map<ProductKey, Index> channels;
  {
    MpoSite<Scalar> time_site;
    time_site.phys_dim = td;
    for (const auto& [key, op] : products) {
      const Index ch = static_cast<Index>(channels.size());
      channels.emplace(key, ch);
      Matrix<Scalar> m = Matrix<Scalar>::Zero(td, td);
      for (const auto& [rc, v] : op)
        m(static_cast<Index>(rc.first), static_cast<Index>(rc.second)) += narrow<Scalar>(v);
      time_site.blocks.push_back({0, ch, std::move(m)});
    }
    time_site.right_dim = static_cast<Index>(channels.size());
    sites.push_back(std::move(time_site));
  }
  for (int w = 0; w < M; ++w) {
    MpoSite<Scalar> site;
    site.phys_dim = 2;
    site.left_dim = static_cast<Index>(channels.size());
    std::map<ProductKey, Index> next;
    for (const auto& [key, ch] : channels) {
      Matrix<Scalar> op = Matrix<Scalar>::Zero(2, 2);
      ProductKey tail;
      if (!key.empty() && key.front().first == w) {
        const int unit = key.front().second;
        op(unit >> 1, unit & 1) = Scalar(1);
        tail.assign(key.begin() + 1, key.end());
      } else {
        op.setIdentity();
        tail = key;
      }
      const auto [it, inserted] = next.emplace(std::move(tail), static_cast<Index>(next.size()));
      site.blocks.push_back({ch, it->second, std::move(op)});
    }
    site.right_dim = static_cast<Index>(next.size());
    channels = std::move(next);
    sites.push_back(std::move(site));
  }
  Mpo<Scalar> mpo(std::move(sites), true);
  return options.compress ? compress_mpo(mpo, options.rel_cutoff) : mpo;
}

template Mpo<double> terms_to_mpo<double>(const ClockHamiltonian&, std::span<const HamiltonianTerm>,
                                          const MpoBuildOptions&);
template Mpo<Complex> terms_to_mpo<Complex>(const ClockHamiltonian&, std::span<const HamiltonianTerm>,
                                            const MpoBuildOptions&);

template <typename Scalar>
Mps<Scalar> history_state_as_mps(const HistoryState& state, int num_wires, const Truncation& trunc) {
  const std::size_t steps = state.coefficients.size();
  std::vector<Index> dims{static_cast<Index>(steps)};
  for (int w = 0; w < num_wires; ++w) dims.push_back(2);
  if (!state.basis.classical) {
    const Vector<Scalar> v = history_vector<Scalar>(state, num_wires);
    return mps_from_dense<Scalar>(v, dims, trunc);
  }
  const int M = num_wires;
  // Channel at the cut before wire w: the bits of wires >= w.
  std::map<std::uint64_t, Index> channels;
  for (std::uint64_t x : state.basis.classical_states) channels.emplace(x, 0);
  {
    Index k = 0;
    for (auto& kv : channels) kv.second = k++;
  }
  std::vector<std::vector<Matrix<Scalar>>> sites;
  {
    std::vector<Matrix<Scalar>> site(steps, Matrix<Scalar>::Zero(1, static_cast<Index>(channels.size())));
    for (std::size_t t = 0; t < steps; ++t)
      site[t](0, channels.at(state.basis.classical_states[t])) += Scalar(state.coefficients[t]);
    sites.push_back(std::move(site));
  }
  for (int w = 0; w < M; ++w) {
    const int rest = M - 1 - w;
    std::map<std::uint64_t, Index> next;
    for (const auto& kv : channels) next.emplace(kv.first & low_mask(rest), 0);
    {
      Index k = 0;
      for (auto& kv : next) kv.second = k++;
    }
    std::vector<Matrix<Scalar>> site(
        2, Matrix<Scalar>::Zero(static_cast<Index>(channels.size()), static_cast<Index>(next.size())));
    for (const auto& [suffix, ch] : channels) {
      const int bit = static_cast<int>((suffix >> rest) & 1);
      site[static_cast<std::size_t>(bit)](ch, next.at(suffix & low_mask(rest))) = Scalar(1);
    }
    sites.push_back(std::move(site));
    channels = std::move(next);
  }
  Mps<Scalar> raw(std::move(sites));
  return compress(raw, trunc).mps;
}

template Mps<double> history_state_as_mps<double>(const HistoryState&, int, const Truncation&);
template Mps<Complex> history_state_as_mps<Complex>(const HistoryState&, int, const Truncation&);

template struct ClockSector<double>;
template struct ClockSector<Complex>;
template ClockSector<double> assemble_sector<double>(const ClockHamiltonian&,
                                                     std::span<const std::uint64_t>, std::uint64_t);
template ClockSector<Complex> assemble_sector<Complex>(const ClockHamiltonian&,
                                                       std::span<const std::uint64_t>, std::uint64_t);

Readout read_sector_assignment(const ClockHamiltonian& h, const ClockSector<double>& sector,
                               const Vector<double>& v) {
  if (v.size() != static_cast<Index>(sector.basis.size()))
    throw std::invalid_argument("read_sector_assignment: vector does not match the sector");
  const auto& c = h.circuit();
  const std::size_t M = static_cast<std::size_t>(c.num_wires());
  std::map<BitString, double> weights;
  double total = 0.0, at_zero = 0.0;
  for (std::size_t k = 0; k < sector.basis.size(); ++k) {
    const double w = v[static_cast<Index>(k)] * v[static_cast<Index>(k)];
    total += w;
    if (sector.basis[k] >= h.data_dim()) continue;
    at_zero += w;
    weights[c.restrict_to_inputs(BitString::from_index(sector.basis[k], M))] += w;
  }
  Readout r;
  if (!(at_zero > 0.0)) return r;
  auto best = weights.begin();
  for (auto it = weights.begin(); it != weights.end(); ++it)
    if (it->second > best->second) best = it;
  r.bits = best->first;
  r.probability = best->second / at_zero;
  r.condition_weight = at_zero / total;
  r.ambiguous = r.probability < kReadoutThreshold;
  return r;
}

}  // namespace clockmps
