#include "clockmps/io.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "clockmps/errors.hpp"

namespace clockmps {

static_assert(std::endian::native == std::endian::little, "payloads assume a little-endian host");

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["flags"] = Json::object();
  for (const auto& [k, v] : flags) j["flags"][k] = v;
  j["inputs"] = Json::array();
  for (const auto& [path, hash] : inputs) j["inputs"].push_back({{"path", path}, {"fnv1a64", hash}});
  j["version"] = version;
  j["seed"] = seed;
  j["timestamp"] = timestamp;
  return j;
}

std::string RunManifest::to_line() const { return to_json().dump(); }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// --- Matrix Market -------------------------------------------------------

namespace {

template <typename Scalar>
constexpr bool is_complex() {
  return !std::is_same_v<Scalar, double>;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

template <typename Scalar>
void write_matrix_market(std::ostream& out, const SparseMatrix<Scalar>& m, const RunManifest* manifest) {
  out << "%%MatrixMarket matrix coordinate " << (is_complex<Scalar>() ? "complex" : "real") << " general\n";
  if (manifest) out << "% manifest " << manifest->to_line() << "\n";
  out << m.rows() << " " << m.cols() << " " << m.nonzeros() << "\n";
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto vals = m.values();
  for (std::int64_t r = 0; r < m.rows(); ++r)
    for (std::int64_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
      out << r + 1 << " " << ci[static_cast<std::size_t>(k)] + 1 << " ";
      const Scalar v = vals[static_cast<std::size_t>(k)];
      if constexpr (is_complex<Scalar>())
        out << format_double(v.real()) << " " << format_double(v.imag()) << "\n";
      else
        out << format_double(v) << "\n";
    }
}

template <typename Scalar>
SparseMatrix<Scalar> read_matrix_market(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty Matrix Market file");
  ++line_no;
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate")
    throw ParseError(line_no, "expected '%%MatrixMarket matrix coordinate ...'");
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "complex" && field != "integer")
    throw ParseError(line_no, "unsupported field '" + field + "'");
  if (field == "complex" && !is_complex<Scalar>())
    throw ParseError(line_no, "complex matrix read as real");
  if (symmetry != "general") throw ParseError(line_no, "only 'general' symmetry is supported");

  std::int64_t rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
      throw ParseError(line_no, "bad size line");
    break;
  }
  if (rows < 0) throw ParseError(line_no, "missing size line");
  std::vector<typename SparseMatrix<Scalar>::Entry> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  while (static_cast<std::int64_t>(entries.size()) < nnz && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    std::int64_t r, c;
    double re, im = 0.0;
    if (!(ss >> r >> c >> re)) throw ParseError(line_no, "bad entry");
    if (field == "complex" && !(ss >> im)) throw ParseError(line_no, "missing imaginary part");
    if (r < 1 || r > rows || c < 1 || c > cols) throw ParseError(line_no, "entry index out of range");
    Scalar v;
    if constexpr (is_complex<Scalar>()) v = Scalar(re, im);
    else v = re;
    entries.push_back({r - 1, c - 1, v});
  }
  if (static_cast<std::int64_t>(entries.size()) != nnz) throw ParseError(line_no, "fewer entries than declared");
  return SparseMatrix<Scalar>::from_entries(rows, cols, std::move(entries));
}

template void write_matrix_market<double>(std::ostream&, const SparseMatrix<double>&, const RunManifest*);
template void write_matrix_market<Complex>(std::ostream&, const SparseMatrix<Complex>&, const RunManifest*);
template SparseMatrix<double> read_matrix_market<double>(std::istream&);
template SparseMatrix<Complex> read_matrix_market<Complex>(std::istream&);

// --- JSON ---------------------------------------------------------------

namespace {

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json terms_to_json(const std::vector<HamiltonianTerm>& terms) {
  Json arr = Json::array();
  for (const auto& t : terms)
    arr.push_back({{"kind", std::string(term_kind_name(t.kind))}, {"t", t.t}, {"wires", t.wires}, {"weight", t.weight}});
  return arr;
}

Json to_json(const SpectrumReport& r) {
  return Json{{"data_dim", r.data_dim},
              {"time_dim", r.time_dim},
              {"dim", r.dim},
              {"solver", std::string(solver_name(r.solver))},
              {"ground_energy", r.ground_energy},
              {"ground_degeneracy", r.ground_degeneracy},
              {"gap", optional_json(r.gap)},
              {"degenerate_at_tolerance", r.degenerate_at_tolerance},
              {"degeneracy_tol", r.degeneracy_tol},
              {"solver_tol", r.solver_tol},
              {"max_residual", r.max_residual},
              {"converged", r.converged},
              {"eigenvalues", r.eigenvalues}};
}

Json to_json(const std::vector<CheckResult>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}, {"detail", c.detail}});
  return arr;
}

Json to_json(const SubspaceReport& r) {
  return Json{{"T", r.T},
              {"A", r.A},
              {"B", r.B},
              {"analytic", r.analytic},
              {"numeric", r.numeric},
              {"max_abs_err", optional_json(r.max_abs_err)},
              {"gap", r.gap},
              {"bound", optional_json(r.bound)}};
}

Json to_json(const GapRow& row) {
  return Json{{"T", row.T},
              {"M", row.M},
              {"dim", row.dim},
              {"ground_energy", row.ground_energy},
              {"degeneracy", row.degeneracy},
              {"gap", row.gap},
              {"gap_T2", row.gap_T2},
              {"solver", std::string(solver_name(row.solver))}};
}

Json to_json(const ConvergenceRun& row) {
  return Json{{"instance", row.instance},
              {"seed", row.seed},
              {"D", row.max_bond},
              {"sweeps", row.sweeps},
              {"final_energy", row.final_energy},
              {"exact_energy", optional_json(row.exact_energy)},
              {"error", row.error},
              {"success", row.success},
              {"wall_seconds", row.wall_seconds}};
}

template <typename Scalar>
Json trace_to_json(const DmrgTrace<Scalar>& trace) {
  const Mps<Scalar>& psi = trace.final_state;
  return Json{{"final_energy", trace.final_energy},
              {"converged", trace.converged},
              {"sweeps_run", trace.sweeps_run},
              {"wall_seconds", trace.wall_seconds},
              {"sweep_energies", trace.sweep_energies},
              {"update_energies", trace.update_energies},
              {"bond_dims", psi.num_sites() ? psi.bond_dims() : std::vector<Index>{}}};
}

template Json trace_to_json<double>(const DmrgTrace<double>&);
template Json trace_to_json<Complex>(const DmrgTrace<Complex>&);

// --- MPS / MPO containers ------------------------------------------------

namespace {

template <typename Scalar>
void put(std::ostream& out, Scalar v) {
  double parts[2];
  std::size_t n = 1;
  if constexpr (is_complex<Scalar>()) {
    parts[0] = v.real();
    parts[1] = v.imag();
    n = 2;
  } else {
    parts[0] = v;
  }
  out.write(reinterpret_cast<const char*>(parts), static_cast<std::streamsize>(n * sizeof(double)));
}

template <typename Scalar>
Scalar get(std::istream& in) {
  double parts[2] = {0.0, 0.0};
  const std::size_t n = is_complex<Scalar>() ? 2 : 1;
  if (!in.read(reinterpret_cast<char*>(parts), static_cast<std::streamsize>(n * sizeof(double))))
    throw ParseError(0, "truncated tensor payload");
  if constexpr (is_complex<Scalar>()) return Scalar(parts[0], parts[1]);
  else return parts[0];
}

Json read_header(std::istream& in, const char* kind, bool complex_scalar) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header line");
  Json h;
  try {
    h = Json::parse(line);
  } catch (const std::exception& e) {
    throw ParseError(1, std::string("bad header: ") + e.what());
  }
  if (h.value("kind", std::string()) != kind) throw ParseError(1, std::string("expected a ") + kind + " container");
  const std::string scalar = h.value("scalar", std::string("real"));
  if (scalar == "complex" && !complex_scalar) throw ParseError(1, "complex payload read as real");
  if (scalar != "complex" && scalar != "real") throw ParseError(1, "unknown scalar type '" + scalar + "'");
  h["__complex_payload"] = scalar == "complex";
  return h;
}

CanonicalForm parse_canonical(const std::string& s) {
  if (s == "none") return {};
  if (s == "left") return {CanonicalKind::Left, 0};
  if (s == "right") return {CanonicalKind::Right, 0};
  if (s.rfind("mixed(", 0) == 0 && s.back() == ')')
    return {CanonicalKind::Mixed, static_cast<std::size_t>(std::stoull(s.substr(6, s.size() - 7)))};
  throw ParseError(1, "unknown canonical form '" + s + "'");
}

template <typename Scalar>
Scalar read_value(std::istream& in, bool complex_payload) {
  if (complex_payload) return get<Scalar>(in);
  return Scalar(get<double>(in));
}

}  // namespace

template <typename Scalar>
void write_mps(std::ostream& out, const Mps<Scalar>& mps, const RunManifest* manifest) {
  Json h{{"kind", "mps"},
         {"sites", mps.num_sites()},
         {"phys_dims", mps.phys_dims()},
         {"bond_dims", mps.bond_dims()},
         {"canonical_form", canonical_form_name(mps.canonical_form())},
         {"scalar", is_complex<Scalar>() ? "complex" : "real"},
         {"index_order", "left,phys,right"},
         {"layout", "row-major float64 little-endian"}};
  if (manifest) h["manifest"] = manifest->to_json();
  out << h.dump() << "\n";
  for (std::size_t s = 0; s < mps.num_sites(); ++s) {
    const auto& site = mps.site(s);
    const Index dl = site[0].rows(), dr = site[0].cols();
    for (Index a = 0; a < dl; ++a)
      for (std::size_t p = 0; p < site.size(); ++p)
        for (Index b = 0; b < dr; ++b) put<Scalar>(out, site[p](a, b));
  }
}

template <typename Scalar>
Mps<Scalar> read_mps(std::istream& in) {
  const Json h = read_header(in, "mps", is_complex<Scalar>());
  const bool cplx = h["__complex_payload"].get<bool>();
  const auto phys = h.at("phys_dims").get<std::vector<Index>>();
  const auto bonds = h.at("bond_dims").get<std::vector<Index>>();
  if (bonds.size() != phys.size() + 1 || h.at("sites").get<std::size_t>() != phys.size())
    throw ParseError(1, "inconsistent MPS header");
  std::vector<std::vector<Matrix<Scalar>>> sites(phys.size());
  for (std::size_t s = 0; s < phys.size(); ++s) {
    const Index dl = bonds[s], dr = bonds[s + 1];
    sites[s].assign(static_cast<std::size_t>(phys[s]), Matrix<Scalar>(dl, dr));
    for (Index a = 0; a < dl; ++a)
      for (Index p = 0; p < phys[s]; ++p)
        for (Index b = 0; b < dr; ++b) sites[s][static_cast<std::size_t>(p)](a, b) = read_value<Scalar>(in, cplx);
  }
  return Mps<Scalar>(std::move(sites), parse_canonical(h.at("canonical_form").get<std::string>()));
}

template <typename Scalar>
void write_mpo(std::ostream& out, const Mpo<Scalar>& mpo, const RunManifest* manifest) {
  Json h{{"kind", "mpo"},
         {"sites", mpo.num_sites()},
         {"phys_dims", mpo.phys_dims()},
         {"bond_dims", mpo.bond_dims()},
         {"hermitian", mpo.hermitian()},
         {"scalar", is_complex<Scalar>() ? "complex" : "real"},
         {"index_order", "left,out,in,right"},
         {"layout", "row-major float64 little-endian"}};
  if (manifest) h["manifest"] = manifest->to_json();
  out << h.dump() << "\n";
  for (std::size_t s = 0; s < mpo.num_sites(); ++s) {
    const auto& site = mpo.site(s);
    const Index d = site.phys_dim;
    std::vector<Scalar> dense(static_cast<std::size_t>(site.left_dim * d * d * site.right_dim), Scalar(0));
    for (const auto& b : site.blocks)
      for (Index o = 0; o < d; ++o)
        for (Index i = 0; i < d; ++i)
          dense[static_cast<std::size_t>(((b.left * d + o) * d + i) * site.right_dim + b.right)] += b.op(o, i);
    for (Scalar v : dense) put<Scalar>(out, v);
  }
}

template <typename Scalar>
Mpo<Scalar> read_mpo(std::istream& in) {
  const Json h = read_header(in, "mpo", is_complex<Scalar>());
  const bool cplx = h["__complex_payload"].get<bool>();
  const auto phys = h.at("phys_dims").get<std::vector<Index>>();
  const auto bonds = h.at("bond_dims").get<std::vector<Index>>();
  if (bonds.size() != phys.size() + 1 || h.at("sites").get<std::size_t>() != phys.size())
    throw ParseError(1, "inconsistent MPO header");
  std::vector<MpoSite<Scalar>> sites(phys.size());
  for (std::size_t s = 0; s < phys.size(); ++s) {
    const Index d = phys[s], dl = bonds[s], dr = bonds[s + 1];
    MpoSite<Scalar>& site = sites[s];
    site.left_dim = dl;
    site.right_dim = dr;
    site.phys_dim = d;
    std::vector<Matrix<Scalar>> ops(static_cast<std::size_t>(dl * dr), Matrix<Scalar>::Zero(d, d));
    for (Index l = 0; l < dl; ++l)
      for (Index o = 0; o < d; ++o)
        for (Index i = 0; i < d; ++i)
          for (Index r = 0; r < dr; ++r) ops[static_cast<std::size_t>(l * dr + r)](o, i) = read_value<Scalar>(in, cplx);
    for (Index l = 0; l < dl; ++l)
      for (Index r = 0; r < dr; ++r) {
        auto& op = ops[static_cast<std::size_t>(l * dr + r)];
        if (op.cwiseAbs().maxCoeff() > 0.0) site.blocks.push_back({l, r, std::move(op)});
      }
  }
  return Mpo<Scalar>(std::move(sites), h.value("hermitian", false));
}

template void write_mps<double>(std::ostream&, const Mps<double>&, const RunManifest*);
template void write_mps<Complex>(std::ostream&, const Mps<Complex>&, const RunManifest*);
template Mps<double> read_mps<double>(std::istream&);
template Mps<Complex> read_mps<Complex>(std::istream&);
template void write_mpo<double>(std::ostream&, const Mpo<double>&, const RunManifest*);
template void write_mpo<Complex>(std::ostream&, const Mpo<Complex>&, const RunManifest*);
template Mpo<double> read_mpo<double>(std::istream&);
template Mpo<Complex> read_mpo<Complex>(std::istream&);

// --- CSV ----------------------------------------------------------------

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, const RunManifest* manifest) {
  if (manifest) out << "# manifest " << manifest->to_line() << "\n";
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ",";
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        out << '"';
        for (char ch : c) out << (ch == '"' ? "\"\"" : std::string(1, ch));
        out << '"';
      } else {
        out << c;
      }
    }
    out << "\n";
  };
  emit(header);
  for (const auto& r : rows) emit(r);
}

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows, const RunManifest* manifest) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({std::to_string(r.T), std::to_string(r.M), std::to_string(r.dim), format_double(r.ground_energy),
                     std::to_string(r.degeneracy), format_double(r.gap), format_double(r.gap_T2)});
  write_csv(out, {"T", "M", "dim", "ground_energy", "degeneracy", "gap", "gap_T2"}, cells, manifest);
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRun>& rows,
                           const RunManifest* manifest) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({r.instance, std::to_string(r.seed), std::to_string(r.max_bond), std::to_string(r.sweeps),
                     format_double(r.final_energy), format_double(r.error), r.success ? "1" : "0",
                     format_double(r.wall_seconds)});
  write_csv(out, {"instance", "seed", "D", "sweeps", "final_energy", "energy_minus_ed", "success", "wall_seconds"},
            cells, manifest);
}

}  // namespace clockmps
