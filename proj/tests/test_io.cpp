#include <gtest/gtest.h>

#include <sstream>

#include "clockmps/errors.hpp"
#include "clockmps/io.hpp"
#include "test_circuits.hpp"

using namespace clockmps;

TEST(Io, FnvKnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Io, ManifestFields) {
  RunManifest m;
  m.command = "compile";
  m.flags["--modulus"] = "15";
  m.inputs.emplace_back("x.cnf", fnv1a_hex("abc"));
  m.seed = 7;
  m.timestamp = "2026-01-01T00:00:00Z";
  const Json j = m.to_json();
  EXPECT_EQ(j["version"], std::string(kToolVersion));
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(m.to_line().find('\n'), std::string::npos);
}

TEST(Io, MatrixMarketRoundTrip) {
  const ClockHamiltonian h(samples::or_verifier());
  const auto m = h.assemble<double>();
  RunManifest man;
  man.command = "compile";
  std::stringstream ss;
  write_matrix_market(ss, m, &man);
  EXPECT_EQ(ss.str().rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
  const auto back = read_matrix_market<double>(ss);
  EXPECT_EQ(back.nonzeros(), m.nonzeros());
  EXPECT_EQ(back.to_dense(), m.to_dense());
}

TEST(Io, MatrixMarketComplex) {
  const ClockHamiltonian h(decompose_toffoli(ReversibleCircuit(3, {1, 2}, 0, {Gate::toffoli(1, 2, 0)})));
  const auto m = h.assemble<Complex>();
  std::stringstream ss;
  write_matrix_market(ss, m);
  const std::string text = ss.str();
  std::stringstream a(text), b(text);
  EXPECT_EQ(read_matrix_market<Complex>(a).to_dense(), m.to_dense());
  EXPECT_THROW(read_matrix_market<double>(b), ParseError);
}

TEST(Io, MatrixMarketErrors) {
  for (const char* bad : {"", "garbage\n",
                          "%%MatrixMarket matrix coordinate real symmetric\n1 1 0\n",
                          "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
                          "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"}) {
    std::stringstream ss(bad);
    EXPECT_THROW(read_matrix_market<double>(ss), ParseError) << bad;
  }
}

TEST(Io, MpsRoundTrip) {
  const auto st = build_history_state(samples::or_verifier(), BitString::from_string("11"), 0);
  auto m = history_state_as_mps<double>(st, 3);
  mixed_canonicalize(m, 2);
  std::stringstream ss;
  write_mps(ss, m);
  const auto back = read_mps<double>(ss);
  EXPECT_EQ(back.bond_dims(), m.bond_dims());
  EXPECT_EQ(back.canonical_form(), m.canonical_form());
  EXPECT_EQ(to_dense(back), to_dense(m));
}

TEST(Io, MpsHeaderAndErrors) {
  const std::vector<Index> dims{2, 2};
  const auto m = random_mps<double>(dims, 2, 1);
  std::stringstream ss;
  write_mps(ss, m);
  std::string header;
  std::getline(ss, header);
  const Json h = Json::parse(header);
  EXPECT_EQ(h["kind"], "mps");
  EXPECT_EQ(h["canonical_form"], "right");
  EXPECT_EQ(h["scalar"], "real");

  const std::string full = [&] { std::stringstream o; write_mps(o, m); return o.str(); }();
  std::stringstream truncated(full.substr(0, full.size() - 8));
  EXPECT_THROW(read_mps<double>(truncated), ParseError);
  std::stringstream as_mpo(full);
  EXPECT_THROW(read_mpo<double>(as_mpo), ParseError);
  std::stringstream junk("not json\n");
  EXPECT_THROW(read_mps<double>(junk), ParseError);
}

TEST(Io, MpoRoundTrip) {
  const ClockHamiltonian h(samples::and_circuit());
  const auto mpo = hamiltonian_to_mpo<double>(h);
  std::stringstream ss;
  write_mpo(ss, mpo);
  const auto back = read_mpo<double>(ss);
  EXPECT_EQ(back.bond_dims(), mpo.bond_dims());
  EXPECT_LT((to_dense(back) - to_dense(mpo)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Io, CsvTables) {
  std::stringstream ss;
  RunManifest man;
  man.command = "gap-sweep";
  GapRow r;
  r.T = 4;
  r.M = 2;
  r.gap = 0.5;
  r.gap_T2 = 8;
  write_gap_csv(ss, {r}, &man);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line.rfind("# ", 0), 0u);
  std::getline(ss, line);
  EXPECT_EQ(line, "T,M,dim,ground_energy,degeneracy,gap,gap_T2");
  std::getline(ss, line);
  EXPECT_EQ(line.substr(0, 4), "4,2,");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Io, JsonReports) {
  const auto r = full_spectrum(ClockHamiltonian(samples::not_circuit()));
  const Json j = to_json(r);
  EXPECT_EQ(j["ground_degeneracy"], 1);
  EXPECT_EQ(j["eigenvalues"].size(), 4u);
  const Json t = terms_to_json(ClockHamiltonian(samples::not_circuit()).terms());
  EXPECT_EQ(t.size(), 2u);
}
