#include <gtest/gtest.h>

#include "clockmps/errors.hpp"
#include "clockmps/instances.hpp"
#include "test_circuits.hpp"

using namespace clockmps;

TEST(Instances, DimacsParsing) {
  const auto f = parse_dimacs("c example\np cnf 3 2\n1 -2 0\n2 3\n 0\n");
  EXPECT_EQ(f.num_vars, 3);
  ASSERT_EQ(f.clauses.size(), 2u);
  EXPECT_EQ(f.clauses[0], (std::vector<int>{1, -2}));
  EXPECT_EQ(f.clauses[1], (std::vector<int>{2, 3}));
  EXPECT_THROW(parse_dimacs("1 2 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 5 0\n"), ParseError);
}

TEST(Instances, SatVerifierAcceptsExactlyTheModels) {
  for (const auto& nf : samples::small_sat_formulas()) {
    const ReversibleCircuit c = build_sat_verifier(nf.formula);
    ASSERT_TRUE(c.is_classical());
    EXPECT_EQ(c.output_wire(), 0);
    const auto acc = enumerate_accepting(c);
    EXPECT_EQ(acc.size(), samples::count_models(nf.formula)) << nf.name;
    for (const auto& a : acc) EXPECT_TRUE(nf.formula.evaluate(a)) << nf.name;
  }
}

TEST(Instances, OrVerifierShape) {
  const auto c = samples::or_verifier();
  EXPECT_EQ(c.num_wires(), 3);
  EXPECT_EQ(c.num_gates(), 6u);
  EXPECT_EQ(c.input_wires(), (std::vector<int>{1, 2}));
}

TEST(Instances, FactoringFifteenHasTheUniqueWitness) {
  const FactoringInstance inst{15, 3};
  const auto c = build_factoring_verifier(inst);
  const auto acc = enumerate_accepting(c);
  ASSERT_EQ(acc.size(), 1u);
  const auto [p, q] = decode_factors(acc[0], 3);
  EXPECT_EQ(p, 3u);
  EXPECT_EQ(q, 5u);
  EXPECT_EQ(acc[0].to_string(), "011101");
}

TEST(Instances, FactoringNineAndPrimes) {
  const auto nine = enumerate_accepting(build_factoring_verifier({9, 3}));
  ASSERT_EQ(nine.size(), 1u);
  EXPECT_EQ(decode_factors(nine[0], 3), std::make_pair(std::uint64_t{3}, std::uint64_t{3}));
  EXPECT_TRUE(enumerate_accepting(build_factoring_verifier({7, 2})).empty());
  EXPECT_TRUE(enumerate_accepting(build_factoring_verifier({13, 3})).empty());
}

TEST(Instances, FactoringValidation) {
  EXPECT_THROW(FactoringInstance({2, 2}).validate(), std::invalid_argument);
  EXPECT_THROW(FactoringInstance({64, 3}).validate(), std::invalid_argument);
  EXPECT_NO_THROW(FactoringInstance({63, 3}).validate());
}

TEST(Instances, DescribeReportsSize) {
  const auto f = samples::or_formula();
  const auto meta = describe(f, build_sat_verifier(f));
  EXPECT_GT(meta.problem_size, 0u);
  ASSERT_TRUE(meta.num_accepting.has_value());
  EXPECT_EQ(*meta.num_accepting, 3u);
}
