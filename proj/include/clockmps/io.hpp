#pragma once

// File formats: run manifests, Matrix Market, term lists, MPS/MPO
// containers, CSV tables and JSON reports.
//
// MPS/MPO container: one JSON header line, then little-endian float64
// payload. MPS tensors are written site by site in (left, phys, right)
// row-major order; MPO tensors in (left, out, in, right) order, dense.
// Complex payloads interleave (re, im).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "clockmps/clock_hamiltonian.hpp"
#include "clockmps/dmrg.hpp"
#include "clockmps/mps.hpp"
#include "clockmps/sparse.hpp"
#include "clockmps/spectral.hpp"
#include "clockmps/subspace.hpp"

namespace clockmps {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> flags;
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, fnv1a64 hex)
  std::string version{kToolVersion};
  std::uint64_t seed = 0;
  std::string timestamp;  // UTC, ISO 8601

  Json to_json() const;
  /// Single line, for comment headers.
  std::string to_line() const;
};

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Reads a whole file; std::runtime_error when it cannot be opened.
std::string read_file(const std::string& path);

std::string utc_timestamp();

// --- Matrix Market -------------------------------------------------------

/// Coordinate general format; real or complex by Scalar. The manifest, if
/// given, is written as a '%' comment line.
template <typename Scalar>
void write_matrix_market(std::ostream& out, const SparseMatrix<Scalar>& m,
                         const RunManifest* manifest = nullptr);

/// Throws ParseError. A complex file read as double is an error.
template <typename Scalar>
SparseMatrix<Scalar> read_matrix_market(std::istream& in);

// --- JSON ---------------------------------------------------------------

Json terms_to_json(const std::vector<HamiltonianTerm>& terms);
Json to_json(const SpectrumReport& report);
Json to_json(const std::vector<CheckResult>& checks);
Json to_json(const SubspaceReport& report);
Json to_json(const GapRow& row);
Json to_json(const ConvergenceRun& row);

template <typename Scalar>
Json trace_to_json(const DmrgTrace<Scalar>& trace);

// --- MPS / MPO containers ------------------------------------------------

template <typename Scalar>
void write_mps(std::ostream& out, const Mps<Scalar>& mps, const RunManifest* manifest = nullptr);
template <typename Scalar>
Mps<Scalar> read_mps(std::istream& in);

template <typename Scalar>
void write_mpo(std::ostream& out, const Mpo<Scalar>& mpo, const RunManifest* manifest = nullptr);
template <typename Scalar>
Mpo<Scalar> read_mpo(std::istream& in);

// --- CSV ----------------------------------------------------------------

/// '#'-prefixed manifest line, header row, then rows.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const RunManifest* manifest = nullptr);

std::string format_double(double v);

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows,
                   const RunManifest* manifest = nullptr);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRun>& rows,
                           const RunManifest* manifest = nullptr);

}  // namespace clockmps
