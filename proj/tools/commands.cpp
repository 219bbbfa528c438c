#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "clockmps/clock_hamiltonian.hpp"
#include "clockmps/dmrg.hpp"
#include "clockmps/errors.hpp"
#include "clockmps/instances.hpp"
#include "clockmps/io.hpp"
#include "clockmps/spectral.hpp"
#include "clockmps/subspace.hpp"

namespace clockmps::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
  std::string format = "json";
};

struct InstanceArgs {
  std::string circuit_path;
  std::string cnf_path;
  std::uint64_t modulus = 0;
  int factor_bits = 0;
  bool decompose = false;
};

struct Loaded {
  ReversibleCircuit circuit;
  std::string label;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::optional<FactoringInstance> factoring;
};

int bit_length(std::uint64_t v) {
  int n = 0;
  while (v) {
    ++n;
    v >>= 1;
  }
  return n;
}

FactoringInstance factoring_instance(std::uint64_t modulus, int factor_bits) {
  FactoringInstance inst{modulus, factor_bits > 0 ? factor_bits : std::max(1, bit_length(modulus / 2))};
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return inst;
}

Loaded load_instance(const InstanceArgs& a) {
  const int given = int(!a.circuit_path.empty()) + int(!a.cnf_path.empty()) + int(a.modulus != 0);
  if (given != 1) throw UsageError("give exactly one of --circuit, --cnf, --modulus");
  std::optional<Loaded> out;
  if (!a.circuit_path.empty()) {
    const std::string text = read_file(a.circuit_path);
    out.emplace(Loaded{parse_circuit(text), a.circuit_path, {{a.circuit_path, fnv1a_hex(text)}}, std::nullopt});
  } else if (!a.cnf_path.empty()) {
    const std::string text = read_file(a.cnf_path);
    const CnfFormula f = parse_dimacs(text);
    out.emplace(Loaded{build_sat_verifier(f), a.cnf_path, {{a.cnf_path, fnv1a_hex(text)}}, std::nullopt});
  } else {
    const FactoringInstance inst = factoring_instance(a.modulus, a.factor_bits);
    out.emplace(Loaded{build_factoring_verifier(inst), "factor" + std::to_string(inst.modulus), {}, inst});
  }
  if (a.decompose) out->circuit = decompose_toffoli(out->circuit);
  return std::move(*out);
}

void add_instance_options(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("--circuit", a.circuit_path, "circuit text file");
  cmd->add_option("--cnf", a.cnf_path, "DIMACS CNF file (SAT verifier)");
  cmd->add_option("--modulus", a.modulus, "factoring verifier for this modulus");
  cmd->add_option("--factor-bits", a.factor_bits, "bits per factor (default: bit length of modulus/2)");
  cmd->add_flag("--decompose-toffoli", a.decompose, "replace TOFFOLI gates by the standard 1- and 2-qubit sequence");
}

RunManifest make_manifest(const std::string& command, const CLI::App& app, const Globals& g,
                          const std::vector<std::pair<std::string, std::string>>& inputs) {
  RunManifest m;
  m.command = command;
  auto collect = [&](const CLI::App& a) {
    for (const CLI::Option* opt : a.get_options()) {
      if (opt->count() == 0 || opt->get_name() == "--help") continue;
      std::string joined;
      for (const auto& r : opt->results()) joined += (joined.empty() ? "" : " ") + r;
      m.flags[opt->get_name()] = joined;
    }
  };
  collect(*app.get_parent());
  collect(app);
  m.inputs = inputs;
  m.seed = g.seed;
  m.timestamp = utc_timestamp();
  return m;
}

fs::path output_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void write_json_file(const fs::path& path, Json body, const RunManifest& manifest) {
  Json doc;
  doc["manifest"] = manifest.to_json();
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  std::ofstream f(path);
  f << doc.dump(2) << "\n";
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

std::string fmt(double v, int precision = 10) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string dims_line(const ClockHamiltonian& h) {
  std::ostringstream os;
  os << "dims: (2^" << h.num_wires() << ", " << h.time_dim() << ")";
  if (h.num_wires() < 63) os << " = " << h.dim();
  return os.str();
}

/// Reference spectrum for a clock Hamiltonian: dense when small, the valid
/// sector for larger classical circuits.
struct Reference {
  SpectrumReport report;
  bool exact = false;
};

std::optional<Reference> reference_spectrum(const ClockHamiltonian& h, const Globals& g) {
  if (h.dim() <= kMaxDenseDim) return Reference{full_spectrum(h), true};
  if (h.is_real()) {
    LanczosSpectrumOptions o;
    o.seed = g.seed;
    const SectorSpectrum s = valid_sector_spectrum(h, o);
    if (s.ground_certified && s.gap_certified) return Reference{s.report, true};
  }
  return std::nullopt;
}

// --- compile --------------------------------------------------------------

struct CompileArgs {
  InstanceArgs inst;
  bool no_matrix = false;
  std::uint64_t max_dim = kMaxAssemblyDim;
};

int cmd_compile(const CompileArgs& a, const Globals& g, const CLI::App& app, std::ostream& out) {
  const Loaded in = load_instance(a.inst);
  const ClockHamiltonian h(in.circuit);
  const RunManifest manifest = make_manifest("compile", app, g, in.inputs);
  int n_init = 0, n_evol = 0, n_final = 0;
  for (const auto& t : h.terms())
    (t.kind == TermKind::Init ? n_init : t.kind == TermKind::Evol ? n_evol : n_final)++;
  out << "circuit: M = " << h.num_wires() << ", T = " << h.num_steps() << ", inputs "
      << in.circuit.input_wires().size() << ", ancillas " << in.circuit.ancilla_wires().size() << "\n";
  out << dims_line(h) << "\n";
  out << "terms: " << h.terms().size() << " (init " << n_init << ", evol " << n_evol << ", final " << n_final << ")\n";

  write_json_file(output_path(g, "terms.json"),
                  Json{{"num_wires", h.num_wires()}, {"num_steps", h.num_steps()}, {"init_weight", h.init_weight()},
                       {"terms", terms_to_json(h.terms())}},
                  manifest);

  if (!a.no_matrix) {
    if (h.dim() > a.max_dim) throw BudgetError("sparse assembly dimension (pass --no-matrix)", h.dim(), a.max_dim);
    auto f = open_out(output_path(g, "hamiltonian.mtx"));
    std::int64_t nnz;
    if (h.is_real()) {
      const auto m = h.assemble<double>(a.max_dim);
      nnz = m.nonzeros();
      write_matrix_market(f, m, &manifest);
    } else {
      const auto m = h.assemble<Complex>(a.max_dim);
      nnz = m.nonzeros();
      write_matrix_market(f, m, &manifest);
    }
    out << "matrix: " << h.dim() << " x " << h.dim() << ", " << nnz << " nonzeros -> hamiltonian.mtx\n";
  }

  auto f = open_out(output_path(g, "hamiltonian.mpo"), true);
  std::vector<Index> bonds;
  if (h.is_real()) {
    const auto mpo = hamiltonian_to_mpo<double>(h);
    bonds = mpo.bond_dims();
    write_mpo(f, mpo, &manifest);
  } else {
    const auto mpo = hamiltonian_to_mpo<Complex>(h);
    bonds = mpo.bond_dims();
    write_mpo(f, mpo, &manifest);
  }
  out << "mpo: " << bonds.size() - 1 << " sites, max bond " << *std::max_element(bonds.begin(), bonds.end())
      << " -> hamiltonian.mpo\n";
  return kOk;
}

// --- spectrum ------------------------------------------------------------

struct SpectrumArgs {
  InstanceArgs inst;
  bool inject_wrong_lambda = false;
  double tol = 1e-9;
  int k = 4;
};

int cmd_spectrum(const SpectrumArgs& a, const Globals& g, const CLI::App& app, std::ostream& out) {
  const Loaded in = load_instance(a.inst);
  const ClockHamiltonian h(in.circuit);
  const RunManifest manifest = make_manifest("spectrum", app, g, in.inputs);
  VerifyOptions vo;
  vo.tol = a.tol;
  vo.inject_wrong_lambda = a.inject_wrong_lambda;
  vo.lanczos.k = a.k;
  vo.lanczos.seed = g.seed;
  const VerifyResult res = verify_spectrum_report(h, vo);
  out << dims_line(h) << "\n";
  out << "solver: " << solver_name(res.report.solver) << ", ground energy " << fmt(res.report.ground_energy)
      << ", degeneracy " << res.report.ground_degeneracy;
  if (res.report.gap) out << ", gap " << fmt(*res.report.gap);
  out << "\n";
  bool all = true;
  for (const auto& c : res.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  value " << fmt(c.value, 3) << "  tol " << fmt(c.tolerance, 3);
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
    all = all && c.passed;
  }
  if (g.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : res.checks)
      rows.push_back({c.name, c.passed ? "1" : "0", format_double(c.value), format_double(c.tolerance), c.detail});
    auto f = open_out(output_path(g, "spectrum_checks.csv"));
    write_csv(f, {"check", "passed", "value", "tolerance", "detail"}, rows, &manifest);
    std::vector<std::vector<std::string>> ev;
    for (std::size_t i = 0; i < res.report.eigenvalues.size(); ++i)
      ev.push_back({std::to_string(i), format_double(res.report.eigenvalues[i])});
    auto fe = open_out(output_path(g, "spectrum.csv"));
    write_csv(fe, {"index", "eigenvalue"}, ev, &manifest);
  } else {
    write_json_file(output_path(g, "spectrum.json"),
                    Json{{"report", to_json(res.report)}, {"checks", to_json(res.checks)}, {"passed", all}}, manifest);
  }
  out << (all ? "all checks passed" : "verification FAILED") << "\n";
  return all ? kOk : kVerificationFailed;
}

// --- subspace -------------------------------------------------------------

struct SubspaceArgs {
  std::vector<std::size_t> T{1};
  int A = 0;
  int B = 0;
  double init_weight = -1.0;
};

int cmd_subspace(const SubspaceArgs& a, const Globals& g, const CLI::App& app, std::ostream& out) {
  const RunManifest manifest = make_manifest("subspace", app, g, {});
  std::vector<SubspaceReport> reports;
  for (std::size_t T : a.T) {
    try {
      reports.push_back(subspace_report(T, a.A, a.B, a.init_weight));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  bool ok = true;
  for (const auto& r : reports) {
    out << "T=" << r.T << " A=" << r.A << " B=" << r.B << "  lambda_0 " << fmt(r.numeric[0]) << "  gap " << fmt(r.gap);
    if (r.max_abs_err) {
      out << "  max |analytic - numeric| " << fmt(*r.max_abs_err, 3);
      ok = ok && *r.max_abs_err <= 1e-9;
    }
    if (r.bound) {
      out << "  lemma bound " << fmt(*r.bound);
      ok = ok && *r.bound <= r.numeric[0] + 1e-12;
    }
    out << "\n";
  }
  if (g.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports)
      for (std::size_t n = 0; n < r.numeric.size(); ++n)
        rows.push_back({std::to_string(r.T), std::to_string(r.A), std::to_string(r.B), std::to_string(n),
                        r.analytic.empty() ? "" : format_double(r.analytic[n]), format_double(r.numeric[n])});
    auto f = open_out(output_path(g, "subspace.csv"));
    write_csv(f, {"T", "A", "B", "n", "analytic", "numeric"}, rows, &manifest);
  } else {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    write_json_file(output_path(g, "subspace.json"), Json{{"reports", arr}}, manifest);
  }
  return ok ? kOk : kVerificationFailed;
}

// --- history-mps ----------------------------------------------------------

struct HistoryArgs {
  InstanceArgs inst;
  std::string input;
  std::size_t level = 0;
  Index max_bond = 0;
  bool allow_penalized = false;
};

int cmd_history(const HistoryArgs& a, const Globals& g, const CLI::App& app, std::ostream& out) {
  const Loaded in = load_instance(a.inst);
  const ReversibleCircuit& c = in.circuit;
  const RunManifest manifest = make_manifest("history-mps", app, g, in.inputs);
  BitString input;
  try {
    input = a.input.empty() ? BitString(c.input_wires().size()) : BitString::from_string(a.input);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--input: ") + e.what());
  }
  HistoryState st = [&] {
    try {
      return build_history_state(c, input, a.level, a.allow_penalized);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  Truncation trunc;
  trunc.max_bond = a.max_bond;
  const int M = c.num_wires();
  const std::size_t T = c.num_gates();
  const Mps<Complex> psi = history_state_as_mps<Complex>(st, M, trunc);
  const std::vector<Index> bonds = psi.internal_bond_dims();
  const Index max_bond = psi.max_bond();
  out << "history state: A = " << st.A << ", B = " << st.B << ", level " << st.level << ", eigenvalue "
      << fmt(st.eigenvalue) << "\n";
  out << "bond dims:";
  for (Index d : bonds) out << " " << d;
  out << "\nmax bond " << max_bond << " (T+1 = " << T + 1 << ")\n";

  bool ok = true;
  Json summary{{"A", st.A}, {"B", st.B}, {"level", st.level}, {"eigenvalue", st.eigenvalue},
               {"T", T}, {"M", M}, {"bond_dims", bonds}, {"max_bond", max_bond},
               {"entropies", entanglement_entropies(psi)}};
  if (c.is_classical() && a.max_bond == 0) {
    ok = ok && static_cast<std::size_t>(max_bond) <= T + 1;
    out << (static_cast<std::size_t>(max_bond) <= T + 1 ? "PASS" : "FAIL") << " bond dims <= T+1\n";
  }
  const std::uint64_t dim = (std::uint64_t{1} << M) * (T + 1);
  if (M <= 20 && dim <= (std::uint64_t{1} << 22)) {
    const Vector<Complex> dense = history_vector<Complex>(st, M);
    const Vector<Complex> v = to_dense(psi);
    const double f = std::norm(dense.dot(v)) / (dense.squaredNorm() * v.squaredNorm());
    summary["fidelity_vs_dense"] = f;
    const bool pass = f >= 1.0 - 1e-10 || a.max_bond > 0;
    ok = ok && pass;
    out << (pass ? "PASS" : "FAIL") << " fidelity vs dense " << fmt(f, 16) << "\n";
  } else {
    summary["fidelity_vs_dense"] = nullptr;
  }
  if (M <= 12) {
    const ClockHamiltonian h(c);
    const Mpo<Complex> mpo = hamiltonian_to_mpo<Complex>(h);
    const double e = std::real(expectation(psi, mpo)) / std::real(overlap(psi, psi));
    summary["energy"] = e;
    out << "energy <H> " << fmt(e, 12) << "\n";
  }
  auto f = open_out(output_path(g, "history.mps"), true);
  if (c.is_classical())
    write_mps(f, history_state_as_mps<double>(st, M, trunc), &manifest);
  else
    write_mps(f, psi, &manifest);
  write_json_file(output_path(g, "history.json"), summary, manifest);
  return ok ? kOk : kVerificationFailed;
}

// --- dmrg -------------------------------------------------------------------

struct DmrgArgs {
  InstanceArgs inst;
  Index bond = 0;
  int sweeps = 10;
  std::vector<std::uint64_t> seeds;
  bool one_site = false;
  std::string init = "random";
  double energy_tol = 1e-10;
};

template <typename Job>
void parallel_for(std::size_t n, int threads, const Job& job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  for (int k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int cmd_dmrg(const DmrgArgs& a, const Globals& g, const CLI::App& app, std::ostream& out) {
  const Loaded in = load_instance(a.inst);
  const ClockHamiltonian h(in.circuit);
  if (!h.is_real()) throw UsageError("dmrg: classical circuits only");
  const RunManifest manifest = make_manifest("dmrg", app, g, in.inputs);
  const Mpo<double> mpo = hamiltonian_to_mpo<double>(h);
  const std::optional<Reference> ref = reference_spectrum(h, g);
  const std::vector<std::uint64_t> seeds = a.seeds.empty() ? std::vector<std::uint64_t>{g.seed} : a.seeds;

  DmrgConfig<double> base;
  base.max_bond = a.bond > 0 ? a.bond : static_cast<Index>(h.time_dim());
  base.num_sweeps = a.sweeps;
  base.two_site = !a.one_site;
  base.energy_tol = a.energy_tol;
  if (a.init == "product") {
    base.init = DmrgInit::Product;
    base.product_config.assign(mpo.num_sites(), 0);
  }
  try {
    base.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  out << dims_line(h) << ", MPO max bond " << mpo.max_bond() << ", D = " << base.max_bond << "\n";
  if (ref) out << "reference ground energy " << fmt(ref->report.ground_energy) << " (" << solver_name(ref->report.solver) << ")\n";

  std::vector<DmrgTrace<double>> traces(seeds.size());
  parallel_for(seeds.size(), g.threads, [&](std::size_t i) {
    DmrgConfig<double> cfg = base;
    cfg.seed = seeds[i];
    traces[i] = dmrg_ground_state(mpo, cfg);
  });

  bool variational = true;
  std::vector<ConvergenceRun> rows;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& tr = traces[i];
    ConvergenceRun row;
    row.instance = in.label;
    row.seed = seeds[i];
    row.max_bond = base.max_bond;
    row.sweeps = tr.sweeps_run;
    row.final_energy = tr.final_energy;
    row.wall_seconds = tr.wall_seconds;
    row.error = std::numeric_limits<double>::quiet_NaN();
    if (ref) {
      row.exact_energy = ref->report.ground_energy;
      row.error = tr.final_energy - ref->report.ground_energy;
      const double gap = ref->report.gap.value_or(std::numeric_limits<double>::infinity());
      row.success = row.error < 0.5 * gap;
      for (double e : tr.update_energies) variational = variational && e >= ref->report.ground_energy - 1e-9;
      variational = variational && row.error >= -1e-9;
    }
    rows.push_back(row);
    out << "seed " << row.seed << ": E = " << fmt(row.final_energy, 12) << ", sweeps " << row.sweeps
        << (tr.converged ? " (converged)" : " (not converged)");
    if (ref) out << ", E - E_ref = " << fmt(row.error, 3) << (row.success ? ", success" : ", fail");
    out << "\n";
    std::ostringstream name;
    name << "dmrg_trace_seed" << seeds[i] << ".json";
    write_json_file(output_path(g, name.str()), Json{{"seed", seeds[i]}, {"trace", trace_to_json(tr)}}, manifest);
  }
  if (g.format == "csv") {
    auto f = open_out(output_path(g, "dmrg.csv"));
    write_convergence_csv(f, rows, &manifest);
  } else {
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    write_json_file(output_path(g, "dmrg.json"), Json{{"runs", arr}}, manifest);
  }
  if (!variational) out << "variational bound VIOLATED\n";
  return variational ? kOk : kVerificationFailed;
}

// --- factor ----------------------------------------------------------------

struct FactorArgs {
  std::uint64_t modulus = 0;
  int factor_bits = 0;
  std::string solver = "lanczos";
  Index bond = 0;
  int sweeps = 20;
  int krylov = 200;
};

int cmd_factor(const FactorArgs& a, const Globals& g, const CLI::App& app, std::ostream& out) {
  const FactoringInstance inst = factoring_instance(a.modulus, a.factor_bits);
  const ReversibleCircuit c = build_factoring_verifier(inst);
  const ClockHamiltonian h(c);
  const RunManifest manifest = make_manifest("factor", app, g, {});
  const std::size_t T = h.num_steps();
  const double no_floor = AnalyticSpectrum(T, SpectrumCase::A0B1).eigenvalue(0);
  out << "verifier: M = " << c.num_wires() << ", T = " << T << ", factor bits " << inst.factor_bits << "\n";

  double energy = 0.0;
  Readout readout;
  Json detail;
  if (a.solver == "lanczos") {
    LanczosSpectrumOptions o;
    o.k = 4;
    o.seed = g.seed;
    o.max_krylov = a.krylov;
    o.extend_degenerate = false;
    const SectorSpectrum s = valid_sector_spectrum(h, o);
    energy = s.report.ground_energy;
    readout = read_sector_assignment(h, s.sector, s.pairs.pairs[0].vector);
    detail = Json{{"sector_dim", s.sector.basis.size()}, {"report", to_json(s.report)},
                  {"outside_lower_bound", s.outside_lower_bound}, {"ground_certified", s.ground_certified}};
    if (!s.ground_certified) out << "warning: sector ground energy is not below the outside bound\n";
  } else if (a.solver == "dmrg") {
    const Mpo<double> mpo = hamiltonian_to_mpo<double>(h);
    DmrgConfig<double> cfg;
    cfg.max_bond = a.bond > 0 ? a.bond : static_cast<Index>(T + 1);
    cfg.num_sweeps = a.sweeps;
    cfg.seed = g.seed;
    const DmrgTrace<double> tr = dmrg_ground_state(mpo, cfg);
    energy = tr.final_energy;
    std::vector<std::size_t> sites;
    for (int w : c.input_wires()) sites.push_back(static_cast<std::size_t>(w) + 1);
    readout = read_assignment(tr.final_state, sites);
    detail = Json{{"trace", trace_to_json(tr)}};
  } else {
    throw UsageError("--solver must be lanczos or dmrg");
  }

  Json result{{"modulus", inst.modulus}, {"factor_bits", inst.factor_bits}, {"solver", a.solver},
              {"M", c.num_wires()}, {"T", T}, {"ground_energy", energy}, {"no_instance_energy", no_floor},
              {"readout_bits", readout.bits.to_string()}, {"readout_probability", readout.probability},
              {"ambiguous", readout.ambiguous}, {"solver_detail", detail}};
  out << "ground energy " << fmt(energy, 12) << " (no-instance floor " << fmt(no_floor, 12) << ")\n";

  int code = kVerificationFailed;
  if (energy < 0.5 * no_floor && !readout.ambiguous && readout.bits.size() == c.input_wires().size()) {
    const auto [p, q] = decode_factors(readout.bits, inst.factor_bits);
    result["p"] = p;
    result["q"] = q;
    out << "readout " << readout.bits.to_string() << " (probability " << fmt(readout.probability, 6) << ")\n";
    if (p * q == inst.modulus && p > 1 && q > 1) {
      result["status"] = "factored";
      out << inst.modulus << " = " << p << " * " << q << "\n";
      code = kOk;
    } else {
      result["status"] = "readout_mismatch";
      out << "readout " << p << " * " << q << " != " << inst.modulus << "\n";
    }
  } else if (energy >= 0.5 * no_floor) {
    result["status"] = "no_accepting_input";
    out << "no accepting input; ground energy > 0: " << fmt(energy, 12) << " (predicted " << fmt(no_floor, 12) << ")\n";
  } else {
    result["status"] = "ambiguous_readout";
    out << "ground energy near 0 but the readout is ambiguous (probability " << fmt(readout.probability, 6) << ")\n";
  }
  result["verified"] = code == kOk;
  write_json_file(output_path(g, "factor.json"), result, manifest);
  return code;
}

// --- gap-sweep --------------------------------------------------------------

struct GapArgs {
  InstanceArgs inst;
  std::size_t t_min = 1;
  std::size_t t_max = 64;
  std::vector<std::size_t> steps;
};

int cmd_gap_sweep(const GapArgs& a, const Globals& g, const CLI::App& app, std::ostream& out) {
  const bool custom = !a.inst.circuit_path.empty() || !a.inst.cnf_path.empty() || a.inst.modulus != 0;
  std::optional<Loaded> in;
  if (custom) in.emplace(load_instance(a.inst));
  const ReversibleCircuit base =
      custom ? in->circuit : ReversibleCircuit(1, {0}, 0, {Gate::not_gate(0)});
  const RunManifest manifest = make_manifest("gap-sweep", app, g, custom ? in->inputs : decltype(in->inputs){});
  std::vector<std::size_t> steps = a.steps;
  if (steps.empty()) {
    if (a.t_min < 1 || a.t_max < a.t_min) throw UsageError("need 1 <= --t-min <= --t-max");
    for (std::size_t t = a.t_min; t <= a.t_max; ++t) steps.push_back(t);
  }
  for (std::size_t t : steps)
    if (t < base.num_gates()) throw UsageError("T = " + std::to_string(t) + " is below the base circuit's gate count");
  GapSweepOptions o;
  o.threads = g.threads;
  o.lanczos.seed = g.seed;
  const std::vector<GapRow> rows = gap_scaling_experiment(base, steps, o);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  out << std::setw(6) << "T" << std::setw(10) << "dim" << std::setw(18) << "ground" << std::setw(6) << "deg"
      << std::setw(18) << "gap" << std::setw(14) << "gap*T^2\n";
  for (const auto& r : rows) {
    lo = std::min(lo, r.gap_T2);
    hi = std::max(hi, r.gap_T2);
    out << std::setw(6) << r.T << std::setw(10) << r.dim << std::setw(18) << fmt(r.ground_energy, 6) << std::setw(6)
        << r.degeneracy << std::setw(18) << fmt(r.gap, 8) << std::setw(14) << fmt(r.gap_T2, 6) << "\n";
  }
  out << "gap*T^2 in [" << fmt(lo, 6) << ", " << fmt(hi, 6) << "]\n";
  if (g.format == "csv") {
    auto f = open_out(output_path(g, "gap_sweep.csv"));
    write_gap_csv(f, rows, &manifest);
  } else {
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    write_json_file(output_path(g, "gap_sweep.json"), Json{{"rows", arr}, {"gap_T2_min", lo}, {"gap_T2_max", hi}},
                    manifest);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clock-Hamiltonian construction, spectra and MPS experiments", "clockmps"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker cap")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", g.format, "table format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  CompileArgs compile;
  auto* c_compile = app.add_subcommand("compile", "build H, write Matrix Market, term list and MPO");
  add_instance_options(c_compile, compile.inst);
  c_compile->add_flag("--no-matrix", compile.no_matrix, "skip the sparse matrix");
  c_compile->add_option("--max-dim", compile.max_dim, "sparse assembly budget")->capture_default_str();

  SpectrumArgs spectrum;
  auto* c_spectrum = app.add_subcommand("spectrum", "spectrum and verification checks");
  add_instance_options(c_spectrum, spectrum.inst);
  c_spectrum->add_flag("--inject-wrong-lambda", spectrum.inject_wrong_lambda, "negative control: perturb the closed form");
  c_spectrum->add_option("--tol", spectrum.tol, "check tolerance")->capture_default_str();
  c_spectrum->add_option("--k", spectrum.k, "Lanczos pairs for large instances")->capture_default_str();

  SubspaceArgs subspace;
  auto* c_subspace = app.add_subcommand("subspace", "tridiagonal block spectra");
  c_subspace->add_option("--T", subspace.T, "one or more T")->capture_default_str();
  c_subspace->add_option("--A", subspace.A, "wrongly initialized ancillas")->capture_default_str();
  c_subspace->add_option("--B", subspace.B, "final penalty (0/1)")->capture_default_str();
  c_subspace->add_option("--init-weight", subspace.init_weight, "init penalty weight (default T)");

  HistoryArgs history;
  auto* c_history = app.add_subcommand("history-mps", "history state as an MPS");
  add_instance_options(c_history, history.inst);
  c_history->add_option("--input", history.input, "input-wire assignment or full register, e.g. 01");
  c_history->add_option("--level", history.level, "level n")->capture_default_str();
  c_history->add_option("--max-bond", history.max_bond, "truncate to this bond (0: none)")->capture_default_str();
  c_history->add_flag("--allow-penalized", history.allow_penalized, "accept A > 0 (numeric block eigenvector)");

  DmrgArgs dmrg;
  auto* c_dmrg = app.add_subcommand("dmrg", "DMRG on the clock MPO");
  add_instance_options(c_dmrg, dmrg.inst);
  c_dmrg->add_option("--bond", dmrg.bond, "max bond D (default T+1)");
  c_dmrg->add_option("--sweeps", dmrg.sweeps, "sweeps")->capture_default_str();
  c_dmrg->add_option("--seeds", dmrg.seeds, "seeds (default --seed)");
  c_dmrg->add_flag("--one-site", dmrg.one_site, "one-site updates");
  c_dmrg->add_option("--init", dmrg.init, "random or product")->check(CLI::IsMember({"random", "product"}));
  c_dmrg->add_option("--energy-tol", dmrg.energy_tol, "sweep convergence tolerance")->capture_default_str();

  FactorArgs factor;
  auto* c_factor = app.add_subcommand("factor", "factor a modulus through the verifier ground state");
  c_factor->add_option("--modulus", factor.modulus, "modulus")->required();
  c_factor->add_option("--factor-bits", factor.factor_bits, "bits per factor (default: bit length of modulus/2)");
  c_factor->add_option("--solver", factor.solver, "lanczos or dmrg")->check(CLI::IsMember({"lanczos", "dmrg"}))->capture_default_str();
  c_factor->add_option("--bond", factor.bond, "DMRG bond (default T+1)");
  c_factor->add_option("--sweeps", factor.sweeps, "DMRG sweeps")->capture_default_str();
  c_factor->add_option("--krylov", factor.krylov, "Lanczos Krylov dimension")->capture_default_str();

  GapArgs gap;
  auto* c_gap = app.add_subcommand("gap-sweep", "gap scaling of a padded circuit family (default: NOT)");
  add_instance_options(c_gap, gap.inst);
  c_gap->add_option("--t-min", gap.t_min, "smallest T")->capture_default_str();
  c_gap->add_option("--t-max", gap.t_max, "largest T")->capture_default_str();
  c_gap->add_option("--steps", gap.steps, "explicit T list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (c_compile->parsed()) return cmd_compile(compile, g, *c_compile, out);
    if (c_spectrum->parsed()) return cmd_spectrum(spectrum, g, *c_spectrum, out);
    if (c_subspace->parsed()) return cmd_subspace(subspace, g, *c_subspace, out);
    if (c_history->parsed()) return cmd_history(history, g, *c_history, out);
    if (c_dmrg->parsed()) return cmd_dmrg(dmrg, g, *c_dmrg, out);
    if (c_factor->parsed()) return cmd_factor(factor, g, *c_factor, out);
    if (c_gap->parsed()) return cmd_gap_sweep(gap, g, *c_gap, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const BudgetError& e) {
    err << "budget: " << e.what() << "\n";
    return kUsageError;
  } catch (const VerificationFailure& e) {
    err << "verification failed: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace clockmps::cli
