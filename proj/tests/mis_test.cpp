#include <gtest/gtest.h>

#include <qesa/mis.hpp>

#include "support/oracles.hpp"

using namespace qesa;
namespace oracle = qesa::testing;

TEST(ExactMis, PathOfThree) {
  const auto c = exact_mis(oracle::path_graph(3));
  EXPECT_EQ(c.size, 2u);
  EXPECT_EQ(c.witness.to_bitstring(), "101");
}

TEST(ExactMis, CompleteGraph) { EXPECT_EQ(exact_mis(oracle::complete_graph(4)).size, 1u); }

TEST(ExactMis, KingsThreeByThreeIsTheCorners) {
  const auto c = exact_mis(generate_kings_graph(3, 3, 1.0, 6.0, 0));
  EXPECT_EQ(c.size, 4u);
  EXPECT_EQ(c.witness.to_bitstring(), "101000101");
}

TEST(ExactMis, EdgelessGraphTakesEverything) {
  const auto c = exact_mis(make_graph(5, {}));
  EXPECT_EQ(c.size, 5u);
}

TEST(ExactMis, MatchesBruteForceOnRandomGraphs) {
  rng gen(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen.below(18);
    const double p = 0.1 + 0.6 * gen.uniform();
    const auto edges = oracle::random_edges(n, p, gen);
    const auto g = make_graph(n, edges);
    const auto c = exact_mis(g);
    ASSERT_EQ(c.size, oracle::brute_force_mis(n, edges)) << "trial " << trial;
    EXPECT_TRUE(is_independent(g, c.witness));
    EXPECT_EQ(c.witness.popcount(), c.size);
  }
}

TEST(ExactMis, MatchesBruteForceOnDilutedKings) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = generate_kings_graph(4, 6, 0.8, 6.0, seed);
    const auto c = exact_mis(g);
    EXPECT_EQ(c.size, oracle::brute_force_mis(g.size(), g.edges()));
    EXPECT_DOUBLE_EQ(approximation_ratio(g, c.witness, c.size), 1.0);
  }
}

TEST(ExactMis, FullKingsLatticeHasKnownSize) {
  // ceil(rows/2) * ceil(cols/2)
  EXPECT_EQ(exact_mis(generate_kings_graph(10, 15, 1.0, 6.0, 0)).size, 40u);
}

TEST(ExactMis, HandlesDilutedKingsAtTheDefaultLimit) {
  const auto g = generate_kings_graph(13, 13, 0.88, 6.0, 4);
  ASSERT_LE(g.size(), 150u);
  const auto c = exact_mis(g);
  EXPECT_TRUE(is_independent(g, c.witness));
  EXPECT_EQ(c.witness.popcount(), c.size);
}

TEST(ExactMis, LimitsAreEnforced) {
  const auto g = generate_kings_graph(13, 13, 1.0, 6.0, 0);
  EXPECT_THROW(exact_mis(g), resource_limit);
  mis_options tiny;
  tiny.node_budget = 3;
  tiny.max_vertices = 1000;
  try {
    exact_mis(g, tiny);
    FAIL() << "expected resource_limit";
  } catch (const resource_limit &e) {
    EXPECT_STREQ(e.what(), "MIS oracle budget exceeded");
  }
}
