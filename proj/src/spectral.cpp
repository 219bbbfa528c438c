#include "clockmps/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>

#include "clockmps/errors.hpp"
#include "clockmps/instances.hpp"
#include "clockmps/subspace.hpp"

namespace clockmps {

std::string_view solver_name(SolverKind kind) {
  return kind == SolverKind::Dense ? "DENSE" : "LANCZOS";
}

SpectrumReport summarize_spectrum(std::vector<double> eigenvalues, SolverKind solver,
                                  double degeneracy_tol) {
  if (eigenvalues.empty()) throw std::invalid_argument("summarize_spectrum: no eigenvalues");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  SpectrumReport r;
  r.solver = solver;
  r.degeneracy_tol = degeneracy_tol;
  r.ground_energy = eigenvalues.front();
  std::size_t deg = 0;
  while (deg < eigenvalues.size() && eigenvalues[deg] - r.ground_energy <= degeneracy_tol) ++deg;
  r.ground_degeneracy = static_cast<int>(deg);
  if (deg < eigenvalues.size()) {
    r.gap = eigenvalues[deg] - r.ground_energy;
  } else {
    r.degenerate_at_tolerance = true;
  }
  r.eigenvalues = std::move(eigenvalues);
  return r;
}

namespace {

void fill_dims(SpectrumReport& r, const ClockHamiltonian& h) {
  r.data_dim = h.data_dim();
  r.time_dim = h.time_dim();
  r.dim = h.dim();
}

template <typename Scalar>
std::vector<double> dense_eigenvalues(const SparseMatrix<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m.to_dense(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

template <typename Scalar>
SpectrumReport lanczos_spectrum_impl(const SparseMatrix<Scalar>& h,
                                     const LanczosSpectrumOptions& options,
                                     LanczosResult<Scalar>* pairs_out) {
  int k = std::max(1, options.k);
  LanczosResult<Scalar> res;
  for (;;) {
    res = lowest_eigenpairs(h, k, options.tol, options.seed, options.max_krylov);
    bool all_ground = true;
    for (const auto& p : res.pairs)
      if (p.value - res.pairs.front().value > options.degeneracy_tol) all_ground = false;
    if (!options.extend_degenerate || !all_ground || k >= h.rows()) break;
    k = static_cast<int>(std::min<std::int64_t>(2 * static_cast<std::int64_t>(k), h.rows()));
  }
  std::vector<double> values;
  double worst = 0.0;
  for (const auto& p : res.pairs) {
    values.push_back(p.value);
    worst = std::max(worst, p.residual);
  }
  SpectrumReport r = summarize_spectrum(values, SolverKind::Lanczos, options.degeneracy_tol);
  r.solver_tol = options.tol;
  r.max_residual = worst;
  r.converged = res.converged;
  r.dim = static_cast<std::uint64_t>(h.rows());
  if (pairs_out) *pairs_out = std::move(res);
  return r;
}

}  // namespace

SpectrumReport full_spectrum(const ClockHamiltonian& h, std::uint64_t max_dim, double degeneracy_tol) {
  const std::uint64_t d = h.dim();
  if (d > max_dim)
    throw BudgetError("dense diagonalization dimension (use the Lanczos solver)", d, max_dim);
  std::vector<double> ev = h.is_real() ? dense_eigenvalues(h.assemble<double>(max_dim))
                                       : dense_eigenvalues(h.assemble<Complex>(max_dim));
  SpectrumReport r = summarize_spectrum(std::move(ev), SolverKind::Dense, degeneracy_tol);
  fill_dims(r, h);
  r.solver_tol = 1e-12;
  return r;
}

template <typename Scalar>
LanczosResult<Scalar> lowest_eigenpairs(const SparseMatrix<Scalar>& h, int k, double tol,
                                        std::uint64_t seed, int max_krylov) {
  if (h.rows() != h.cols()) throw std::invalid_argument("lowest_eigenpairs: matrix is not square");
  LanczosOptions opts;
  opts.tol = tol;
  opts.seed = seed;
  opts.max_krylov = max_krylov;
  opts.norm_hint = h.norm_bound();
  return lanczos_lowest(h, k, opts);
}

template LanczosResult<double> lowest_eigenpairs<double>(const SparseMatrix<double>&, int, double,
                                                         std::uint64_t, int);
template LanczosResult<Complex> lowest_eigenpairs<Complex>(const SparseMatrix<Complex>&, int, double,
                                                           std::uint64_t, int);

SpectrumReport lanczos_spectrum(const SparseMatrix<double>& h, const LanczosSpectrumOptions& options,
                                LanczosResult<double>* pairs) {
  return lanczos_spectrum_impl(h, options, pairs);
}

SpectrumReport lanczos_spectrum(const SparseMatrix<Complex>& h, const LanczosSpectrumOptions& options,
                                LanczosResult<Complex>* pairs) {
  return lanczos_spectrum_impl(h, options, pairs);
}

SpectrumReport lowest_spectrum(const ClockHamiltonian& h, const LanczosSpectrumOptions& options,
                               std::uint64_t max_dim) {
  SpectrumReport r = h.is_real() ? lanczos_spectrum(h.assemble<double>(max_dim), options)
                                 : lanczos_spectrum(h.assemble<Complex>(max_dim), options);
  fill_dims(r, h);
  return r;
}

SectorSpectrum valid_sector_spectrum(const ClockHamiltonian& h, const LanczosSpectrumOptions& options,
                                     std::uint64_t max_dim) {
  if (!h.is_real()) throw std::invalid_argument("valid_sector_spectrum: classical circuits only");
  SectorSpectrum out;
  const auto seeds = valid_input_seeds(h);
  out.sector = assemble_sector<double>(h, seeds, max_dim);
  out.report = lanczos_spectrum(out.sector.matrix, options, &out.pairs);
  out.report.data_dim = h.data_dim();
  out.report.time_dim = h.time_dim();
  out.report.dim = out.sector.basis.size();
  if (h.circuit().ancilla_wires().empty()) {
    out.outside_lower_bound = std::numeric_limits<double>::infinity();
  } else {
    const PenaltyProfile p = PenaltyProfile::canonical(h.num_steps(), 1, 0, h.init_weight());
    out.outside_lower_bound = numeric_eigenvalues(SubspaceHamiltonian(p), 0, 1)[0];
  }
  const double margin = 1e-9;
  out.ground_certified = out.report.ground_energy < out.outside_lower_bound - margin;
  out.gap_certified = out.report.gap.has_value() &&
                      out.report.ground_energy + *out.report.gap < out.outside_lower_bound - margin;
  return out;
}

std::vector<double> block_union_spectrum(const ClockHamiltonian& h, int max_wires) {
  const auto& c = h.circuit();
  if (!c.is_classical()) throw std::invalid_argument("block_union_spectrum: classical circuits only");
  if (c.num_wires() > max_wires)
    throw BudgetError("block union registers (bits)", static_cast<std::uint64_t>(c.num_wires()),
                      static_cast<std::uint64_t>(max_wires));
  const int M = c.num_wires();
  const std::size_t T = h.num_steps();
  const std::uint64_t out_mask = wire_mask(M, c.output_wire());
  std::map<std::pair<int, int>, std::vector<double>> cache;
  std::vector<double> all;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << M); ++x) {
    const BitString full = BitString::from_index(x, static_cast<std::size_t>(M));
    const int A = c.wrong_ancillas(full);
    const int B = (simulate_classical(c, x, T) & out_mask) ? 0 : 1;
    auto it = cache.find({A, B});
    if (it == cache.end()) {
      const PenaltyProfile p = PenaltyProfile::canonical(T, A, B, h.init_weight());
      it = cache.emplace(std::make_pair(A, B), tridiagonal_eigenvalues(SubspaceHamiltonian(p).matrix())).first;
    }
    all.insert(all.end(), it->second.begin(), it->second.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

ReversibleCircuit pad_circuit(const ReversibleCircuit& base, std::size_t target_steps) {
  if (target_steps < base.num_gates())
    throw std::invalid_argument("pad_circuit: target T " + std::to_string(target_steps) +
                                " below the base circuit's " + std::to_string(base.num_gates()));
  const int spectator = base.num_wires();
  std::vector<Gate> gates = base.gates();
  while (gates.size() < target_steps) gates.push_back(Gate::not_gate(spectator));
  return ReversibleCircuit(base.num_wires() + 1, base.input_wires(), base.output_wire(),
                           std::move(gates));
}

std::vector<GapRow> gap_scaling_experiment(const ReversibleCircuit& base,
                                           const std::vector<std::size_t>& steps,
                                           const GapSweepOptions& options) {
  std::vector<GapRow> rows(steps.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(steps.size());
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < steps.size();) {
      try {
        const ClockHamiltonian h(pad_circuit(base, steps[i]));
        const SpectrumReport r = h.dim() <= options.max_dense_dim
                                     ? full_spectrum(h, options.max_dense_dim)
                                     : lowest_spectrum(h, options.lanczos);
        GapRow row;
        row.T = steps[i];
        row.M = h.num_wires();
        row.dim = h.dim();
        row.ground_energy = r.ground_energy;
        row.degeneracy = r.ground_degeneracy;
        row.gap = r.gap.value_or(std::numeric_limits<double>::quiet_NaN());
        row.gap_T2 = row.gap * static_cast<double>(row.T) * static_cast<double>(row.T);
        row.solver = r.solver;
        rows[i] = row;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(options.threads, static_cast<int>(steps.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

CheckResult make_check(std::string name, double value, double tol, std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tol;
  c.passed = std::isfinite(value) && value <= tol;
  c.detail = std::move(detail);
  return c;
}

}  // namespace

namespace {

void closed_form_checks(const ClockHamiltonian& h, bool has_accept, bool has_reject, double lambda_shift,
                        double tol, std::vector<CheckResult>& checks) {
  const std::size_t T = h.num_steps();
  for (int B = 0; B <= 1; ++B) {
    if ((B == 0 && !has_accept) || (B == 1 && !has_reject)) continue;
    const AnalyticSpectrum analytic(T, B ? SpectrumCase::A0B1 : SpectrumCase::A0B0);
    std::vector<double> lam = analytic.eigenvalues();
    for (double& l : lam) l += lambda_shift;
    const SubspaceHamiltonian sub(PenaltyProfile::canonical(T, 0, B));
    const std::vector<double> numeric = tridiagonal_eigenvalues(sub.matrix());
    checks.push_back(make_check(B ? "closed_form_A0B1" : "closed_form_A0B0", max_abs_diff(lam, numeric), tol));
  }
}

void ground_checks(const SpectrumReport& spec, std::size_t T, std::size_t num_accepting, double lambda_shift,
                   double tol, std::vector<CheckResult>& checks) {
  if (num_accepting > 0) {
    const double deg_err = std::abs(spec.ground_degeneracy - static_cast<double>(num_accepting));
    checks.push_back(make_check("degeneracy", deg_err, 0.0,
                                "ground degeneracy " + std::to_string(spec.ground_degeneracy) +
                                    ", accepting inputs " + std::to_string(num_accepting)));
    checks.push_back(make_check("frustration_free", std::abs(spec.ground_energy), tol));
  } else {
    const double expected = AnalyticSpectrum(T, SpectrumCase::A0B1).eigenvalue(0) + lambda_shift;
    checks.push_back(make_check("no_instance_ground", std::abs(spec.ground_energy - expected), tol,
                                "expected " + std::to_string(expected)));
  }
}

void bound_checks(const ClockHamiltonian& h, std::vector<CheckResult>& checks) {
  const std::size_t T = h.num_steps();
  // The stated A=1 bound assumes the default init weight T.
  if (h.init_weight() == static_cast<double>(T)) {
    const PenaltyProfile p = PenaltyProfile::canonical(T, 1, 0, h.init_weight());
    const double ground = numeric_eigenvalues(SubspaceHamiltonian(p), 0, 1)[0];
    const double bound = a1_gap_bound(T);
    checks.push_back(make_check("a1_bound", std::max(0.0, bound - ground), 1e-12,
                                "bound " + std::to_string(bound) + " <= ground " + std::to_string(ground)));
    const auto [P, Q] = clock_split(p);
    const GapLemmaResult lemma = gap_lemma_bound(P, Q);
    checks.push_back(make_check("gap_lemma_split", std::max(0.0, lemma.bound - ground), 1e-12,
                                "lemma " + std::to_string(lemma.bound)));
  }
}

std::vector<CheckResult> dense_checks(const ClockHamiltonian& h, const SpectrumReport& spec,
                                      const VerifyOptions& options) {
  std::vector<CheckResult> checks;
  const auto& circuit = h.circuit();
  const std::size_t T = h.num_steps();
  const double lambda_shift = options.inject_wrong_lambda ? 1e-3 : 0.0;

  const bool real = h.is_real();
  const SparseMatrix<double> hr = real ? h.assemble<double>(options.max_dense_dim) : SparseMatrix<double>{};
  const SparseMatrix<Complex> hc = real ? SparseMatrix<Complex>{} : h.assemble<Complex>(options.max_dense_dim);
  checks.push_back(make_check("hermiticity", real ? hr.hermiticity_defect() : hc.hermiticity_defect(), 1e-12));
  checks.push_back(make_check("positivity", std::max(0.0, -spec.ground_energy), 1e-9,
                              "smallest eigenvalue " + std::to_string(spec.ground_energy)));

  if (real) {
    const std::vector<double> blocks = block_union_spectrum(h);
    checks.push_back(make_check("block_union", max_abs_diff(spec.eigenvalues, blocks), options.tol,
                                std::to_string(blocks.size()) + " eigenvalues"));
  }

  const std::vector<BitString> accepting = enumerate_accepting(circuit, options.max_enumerated_inputs);
  const std::size_t n_inputs = std::size_t{1} << circuit.input_wires().size();
  closed_form_checks(h, !accepting.empty(), accepting.size() < n_inputs, lambda_shift, options.tol, checks);

  // History states as eigenvectors of the full operator.
  {
    double worst = 0.0;
    int tested = 0;
    for (std::uint64_t a = 0; a < n_inputs; ++a) {
      const BitString in = BitString::from_index(a, circuit.input_wires().size());
      for (std::size_t n = 0; n <= std::min<std::size_t>(T, 1); ++n) {
        const HistoryState st = build_history_state(circuit, in, n);
        const double lam = st.eigenvalue + lambda_shift;
        double res;
        if (real) {
          const Vector<double> v = history_vector<double>(st, circuit.num_wires());
          res = (hr * v - lam * v).norm();
        } else {
          const Vector<Complex> v = history_vector<Complex>(st, circuit.num_wires());
          res = (hc * v - lam * v).norm();
        }
        worst = std::max(worst, res);
        ++tested;
      }
    }
    checks.push_back(make_check("history_residual", worst, options.tol,
                                std::to_string(tested) + " history states"));
  }

  ground_checks(spec, T, accepting.size(), lambda_shift, options.tol, checks);
  bound_checks(h, checks);
  return checks;
}

std::vector<CheckResult> sector_checks(const ClockHamiltonian& h, const SectorSpectrum& sector,
                                       const VerifyOptions& options) {
  std::vector<CheckResult> checks;
  const auto& circuit = h.circuit();
  const double lambda_shift = options.inject_wrong_lambda ? 1e-3 : 0.0;
  const SpectrumReport& spec = sector.report;
  checks.push_back(make_check("lanczos_converged", spec.converged ? 0.0 : spec.max_residual, 0.0,
                              "max residual " + std::to_string(spec.max_residual)));
  checks.push_back(make_check("sector_certificate",
                              std::max(0.0, spec.ground_energy - sector.outside_lower_bound), 0.0,
                              "sector ground " + std::to_string(spec.ground_energy) + " < outside bound " +
                                  std::to_string(sector.outside_lower_bound)));
  if (static_cast<int>(circuit.input_wires().size()) <= options.max_enumerated_inputs) {
    const std::vector<BitString> accepting = enumerate_accepting(circuit, options.max_enumerated_inputs);
    const std::size_t n_inputs = std::size_t{1} << circuit.input_wires().size();
    closed_form_checks(h, !accepting.empty(), accepting.size() < n_inputs, lambda_shift, options.tol, checks);
    ground_checks(spec, h.num_steps(), accepting.size(), lambda_shift, options.tol, checks);
  }
  bound_checks(h, checks);
  return checks;
}

}  // namespace

std::vector<CheckResult> verify_spectrum(const ClockHamiltonian& h, const VerifyOptions& options) {
  return dense_checks(h, full_spectrum(h, options.max_dense_dim), options);
}

VerifyResult verify_spectrum_report(const ClockHamiltonian& h, const VerifyOptions& options) {
  VerifyResult out;
  if (h.dim() <= options.max_dense_dim) {
    out.report = full_spectrum(h, options.max_dense_dim);
    out.checks = dense_checks(h, out.report, options);
    return out;
  }
  if (!h.is_real())
    throw BudgetError("dense diagonalization dimension (non-classical circuit)", h.dim(), options.max_dense_dim);
  LanczosSpectrumOptions lo = options.lanczos;
  lo.extend_degenerate = true;
  const SectorSpectrum sector = valid_sector_spectrum(h, lo);
  out.report = sector.report;
  out.checks = sector_checks(h, sector, options);
  return out;
}

}  // namespace clockmps
