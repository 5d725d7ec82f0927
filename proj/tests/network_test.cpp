#include <gtest/gtest.h>

#include <random>

#include "spnet/conjecture.hpp"
#include "spnet/io.hpp"
#include "spnet/network.hpp"
#include "support.hpp"

namespace {

using spnet::ActivityNetwork;
using spnet::Rational;
using spnet::Workload;

TEST(Network, ClosureMatchesWarshallOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    std::vector<spnet::Edge> edges;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (rng() % 4 == 0) edges.emplace_back(a, b);
    auto g = ActivityNetwork::from_edges(n, edges);
    oracle::Relation raw(n, std::vector<bool>(n, false));
    for (auto [a, b] : edges) raw[a][b] = true;
    EXPECT_EQ(oracle::relation(g), oracle::warshall(raw));
  }
}

TEST(Network, RejectsCyclesAndBadIds) {
  EXPECT_THROW(ActivityNetwork::from_edges(3, {{0, 1}, {1, 2}, {2, 0}}), spnet::CycleError);
  EXPECT_THROW(ActivityNetwork::from_edges(2, {{1, 1}}), spnet::CycleError);
  EXPECT_THROW(ActivityNetwork::from_edges(2, {{0, 2}}), spnet::IdOutOfRange);
  EXPECT_THROW(ActivityNetwork::from_edges(2, {{-1, 0}}), spnet::IdOutOfRange);
}

TEST(Network, ErrorCategories) {
  EXPECT_THROW(ActivityNetwork::from_edges(2, {{0, 5}}), spnet::InputError);
  EXPECT_THROW(ActivityNetwork::from_edges(2, {{0, 1}, {1, 0}}), spnet::SemanticError);
  EXPECT_THROW(Workload({Rational(1), Rational(0)}), spnet::InvalidWorkload);
  EXPECT_THROW(Workload({Rational(-1, 2)}), spnet::SemanticError);
}

TEST(Network, MakespanMatchesRelaxationOracle) {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 5; ++n)
    for (const auto& g : spnet::enumerate_posets(n)) {
      const auto r = oracle::relation(g);
      for (int k = 0; k < 5; ++k) {
        auto t = testutil::random_workload(rng, n);
        EXPECT_EQ(spnet::makespan(g, t), oracle::makespan(r, t.durations()));
      }
    }
}

TEST(Network, CriticalChainIsAChainAttainingMakespan) {
  std::mt19937_64 rng(3);
  for (const auto& g : spnet::enumerate_posets(5)) {
    auto t = testutil::random_workload(rng, 5);
    auto c = spnet::critical_chain(g, t);
    EXPECT_TRUE(spnet::is_chain(g, c.activities));
    EXPECT_EQ(spnet::chain_duration(c, t), spnet::makespan(g, t));
  }
}

TEST(Network, MaximalChainsAttainMakespan) {
  std::mt19937_64 rng(5);
  for (const auto& g : spnet::enumerate_posets(5)) {
    auto t = testutil::random_workload(rng, 5);
    Rational best = 0;
    for (const auto& c : spnet::maximal_chains(g)) {
      EXPECT_TRUE(spnet::is_chain(g, c.activities));
      best = std::max(best, spnet::chain_duration(c, t));
    }
    EXPECT_EQ(best, spnet::makespan(g, t));
  }
}

TEST(Network, TransitiveReductionRegeneratesClosure) {
  for (const auto& g : spnet::enumerate_posets(5)) {
    auto r = spnet::transitive_reduction(g);
    EXPECT_EQ(ActivityNetwork::from_edges(5, r), g);
    for (auto [a, b] : r)
      for (int c = 0; c < 5; ++c) EXPECT_FALSE(g.precedes(a, c) && g.precedes(c, b));
  }
}

TEST(Network, DepthAndWidthOfNsGrid) {
  auto g = spnet::ns_network({3, 8, 3});
  EXPECT_EQ(g.size(), 24);
  EXPECT_EQ(spnet::depth(g), 3);
  EXPECT_EQ(spnet::width(g), 8);
  EXPECT_EQ(spnet::depth(spnet::chain_network(5)), 5);
  EXPECT_EQ(spnet::width(spnet::antichain_network(5)), 5);
}

TEST(Network, SlowdownOfExtensionAtLeastOne) {
  std::mt19937_64 rng(9);
  auto g = spnet::n_network();
  for (const auto& h : spnet::all_extensions(g)) {
    auto t = testutil::random_workload(rng, 4);
    EXPECT_GE(spnet::slowdown(g, h, t), 1);
  }
}

TEST(Network, DualReversesPrecedence) {
  auto g = spnet::n_network();
  auto d = spnet::dual(g);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_EQ(g.precedes(a, b), d.precedes(b, a));
  EXPECT_EQ(spnet::dual(d), g);
}

TEST(Io, JsonRoundTripKeepsClosureLabelsAndWorkload) {
  std::mt19937_64 rng(13);
  for (const auto& g0 : spnet::enumerate_posets(5)) {
    auto g = g0.with_labels({"p", "q", "r", "s", "u"});
    auto t = testutil::random_workload(rng, 5);
    auto doc = spnet::network_from_json(spnet::parse_json_text(spnet::network_to_json(g, t).dump()));
    EXPECT_EQ(doc.network, g);
    EXPECT_EQ(doc.network.labels(), g.labels());
    ASSERT_TRUE(doc.workload);
    EXPECT_EQ(*doc.workload, t);
  }
}

TEST(Io, RationalTextForms) {
  EXPECT_EQ(spnet::parse_rational("4/3"), Rational(4, 3));
  EXPECT_EQ(spnet::parse_rational("8/6"), Rational(4, 3));
  EXPECT_EQ(spnet::parse_rational("2.5"), Rational(5, 2));
  EXPECT_EQ(spnet::parse_rational("-3"), Rational(-3));
  EXPECT_EQ(spnet::format_rational(Rational(10, 4)), "5/2");
  EXPECT_EQ(spnet::format_rational(Rational(7)), "7");
  EXPECT_THROW(spnet::parse_rational("1/0"), spnet::InputError);
  EXPECT_THROW(spnet::parse_rational("abc"), spnet::InputError);
  EXPECT_THROW(spnet::parse_rational(""), spnet::InputError);
}

TEST(Io, MalformedDocuments) {
  using spnet::network_from_json;
  using spnet::parse_json_text;
  EXPECT_THROW(parse_json_text("{"), spnet::ParseError);
  EXPECT_THROW(network_from_json(parse_json_text("[]")), spnet::ParseError);
  EXPECT_THROW(network_from_json(parse_json_text(R"({"edges":[]})")), spnet::ParseError);
  EXPECT_THROW(network_from_json(parse_json_text(R"({"n":2,"edges":[[0]]})")), spnet::ParseError);
  EXPECT_THROW(network_from_json(parse_json_text(R"({"n":2,"edges":[[0,1]],"workload":["1"]})")),
               spnet::MissingDuration);
  EXPECT_THROW(network_from_json(parse_json_text(R"({"n":2,"edges":[[0,1],[1,0]]})")), spnet::CycleError);
  EXPECT_THROW(network_from_json(parse_json_text(R"({"n":1,"workload":["0"]})")), spnet::InvalidWorkload);
}

TEST(Io, FixturesLoad) {
  const std::string dir = SPNET_FIXTURES;
  auto n = spnet::network_from_json(spnet::read_json_file(dir + "/n4_N.json"));
  EXPECT_EQ(n.network, spnet::n_network());
  ASSERT_TRUE(n.workload);
  EXPECT_EQ(spnet::makespan(n.network, *n.workload), 3);
  auto ns = spnet::network_from_json(spnet::read_json_file(dir + "/ns_3_8_3.json"));
  EXPECT_EQ(ns.network, spnet::ns_network({3, 8, 3}));
  for (const char* f : {"/fig2a.json", "/fig2b.json"})
    EXPECT_EQ(spnet::network_from_json(spnet::read_json_file(dir + f)).network.size(), 16);
  EXPECT_THROW(spnet::read_json_file(dir + "/missing.json"), spnet::InputError);
}

TEST(Io, DotOutputListsReductionEdges) {
  auto dot = spnet::to_dot(spnet::n_network().with_labels({"a", "b", "c", "d"}));
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("label=\"a\""), std::string::npos);
  EXPECT_NE(dot.find("n0 -> n2;"), std::string::npos);
  EXPECT_NE(dot.find("n1 -> n3;"), std::string::npos);
  EXPECT_EQ(dot.find("n0 -> n1;"), std::string::npos);
}

}  // namespace
