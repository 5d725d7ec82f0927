#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spnet/conjecture.hpp"
#include "spnet/io.hpp"
#include "support.hpp"

namespace {

using spnet::ActivityNetwork;
using spnet::Rational;

TEST(Posets, CountsMatchLabelledOracle) {
  for (int n = 0; n <= 5; ++n) {
    auto lib = spnet::enumerate_posets(n);
    EXPECT_EQ(lib.size(), n == 0 ? 1U : oracle::poset_classes(n).size()) << "n=" << n;
    std::set<std::vector<bool>> keys;
    for (const auto& g : lib) keys.insert(oracle::canonical_key(oracle::relation(g)));
    EXPECT_EQ(keys.size(), lib.size()) << "duplicate class at n=" << n;
  }
  EXPECT_EQ(spnet::enumerate_posets(6).size(), 318U);
}

TEST(Posets, SizeGuard) {
  EXPECT_THROW(spnet::enumerate_posets(spnet::kMaxPosetSize + 1), spnet::SizeLimitExceeded);
  EXPECT_THROW(spnet::enumerate_posets(-1), spnet::PreconditionViolation);
}

TEST(Posets, CanonicalFormIsAnIsomorphismInvariant) {
  std::mt19937_64 rng(51);
  for (const auto& g : spnet::enumerate_posets(5)) {
    std::vector<int> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<spnet::Edge> edges;
    for (auto [a, b] : g.closure_pairs()) edges.emplace_back(perm[a], perm[b]);
    auto h = ActivityNetwork::from_edges(5, edges);
    EXPECT_EQ(spnet::canonical_form(h), spnet::canonical_form(g));
    EXPECT_TRUE(spnet::isomorphic(g, h));
  }
}

TEST(Candidates, SmallSizes) {
  auto four = spnet::candidate_networks(4);
  ASSERT_EQ(four.size(), 1U);
  EXPECT_TRUE(spnet::isomorphic(four[0], spnet::n_network()));
  EXPECT_EQ(spnet::candidate_networks(5).size(), 3U);
  for (const auto& g : spnet::candidate_networks(5)) EXPECT_FALSE(spnet::is_series_parallel(g));
}

TEST(Candidates, NonSpCountsAgreeWithOracle) {
  std::size_t non_sp = 0;
  std::set<std::vector<bool>> up_to_dual;
  for (const auto& k : oracle::poset_classes(5)) {
    auto r = oracle::from_key(k, 5);
    if (!oracle::has_n(r)) continue;
    ++non_sp;
    oracle::Relation d(5, std::vector<bool>(5, false));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) d[i][j] = r[j][i];
    up_to_dual.insert(std::min(k, oracle::canonical_key(d)));
  }
  auto report = spnet::check_conjecture(5);
  EXPECT_EQ(report.non_sp, non_sp);
  EXPECT_EQ(report.non_sp_dual_classes, up_to_dual.size());
}

TEST(Systems, NetworkNHasSixteenSystems) {
  auto plan = spnet::plan_systems(spnet::n_network());
  EXPECT_EQ(plan.sp_extensions, 3U);
  EXPECT_EQ(plan.decomposable_extensions, 0U);
  EXPECT_EQ(plan.base_chains.size(), 3U);
  EXPECT_EQ(spnet::system_count(plan), 16);
  auto systems = spnet::build_systems(plan);
  ASSERT_EQ(systems.size(), 16U);
  for (const auto& s : systems) {
    auto r = spnet::fm_feasible(s);
    EXPECT_FALSE(r.feasible);
    EXPECT_FALSE(r.refutation.empty());
  }
}

TEST(Systems, ProvenanceTagsNameExtensionAndChains) {
  auto plan = spnet::plan_systems(spnet::n_network().with_labels({"a", "b", "c", "d"}));
  auto s = spnet::extension_constraints(plan, 0, 0);
  ASSERT_EQ(s.provenance.size(), s.inequalities.size());
  for (const auto& tag : s.provenance) EXPECT_EQ(tag.rfind("H0/C=", 0), 0U) << tag;
}

TEST(Candidates, BoundFourThirdsHoldsForFourAndFive) {
  for (int n : {4, 5}) {
    auto report = spnet::check_conjecture(n);
    EXPECT_EQ(report.counterexamples(), 0U) << "n=" << n;
  }
}

// Minimum over SP extensions via the oracle relation helpers.
Rational oracle_best_slowdown(const ActivityNetwork& g, const spnet::Workload& t) {
  const Rational base = oracle::makespan(oracle::relation(g), t.durations());
  std::optional<Rational> best;
  for (const auto& h : spnet::all_extensions(g)) {
    auto r = oracle::relation(h);
    if (oracle::has_n(r)) continue;
    Rational v = oracle::makespan(r, t.durations()) / base;
    if (!best || v < *best) best = v;
  }
  return *best;
}

TEST(Candidates, LowerBoundYieldsVerifiedCounterexample) {
  auto r = spnet::check_candidate(spnet::n_network(), Rational(5, 4));
  ASSERT_TRUE(r.counterexample);
  ASSERT_TRUE(r.witness);
  EXPECT_GT(oracle_best_slowdown(spnet::n_network(), *r.witness), Rational(5, 4));
}

TEST(Candidates, DualGivesSameVerdict) {
  for (const auto& g : spnet::candidate_networks(5)) {
    for (auto bound : {Rational(4, 3), Rational(5, 4), Rational(6, 5)}) {
      auto a = spnet::check_candidate(g, bound);
      auto b = spnet::check_candidate(spnet::dual(g), bound);
      EXPECT_EQ(a.counterexample, b.counterexample);
    }
  }
}

TEST(Candidates, SixActivityCounterexampleFixture) {
  auto doc = spnet::network_from_json(spnet::read_json_file(std::string(SPNET_FIXTURES) + "/n6_counterexample.json"));
  ASSERT_TRUE(doc.workload);
  const auto& g = doc.network;
  const auto& t = *doc.workload;
  EXPECT_EQ(spnet::makespan(g, t), 5);
  Rational best = 100;
  for (const auto& h : spnet::all_sp_extensions(g)) best = std::min(best, spnet::makespan(h, t));
  EXPECT_EQ(best, 7);
  EXPECT_TRUE(spnet::verify_counterexample(g, t, Rational(4, 3)));
  EXPECT_EQ(oracle_best_slowdown(g, t), Rational(7, 5));
}

class Checkpoint : public ::testing::Test {
 protected:
  std::filesystem::path path = std::filesystem::temp_directory_path() /
                               ("spnet_ckpt_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".jsonl");
  void TearDown() override { std::filesystem::remove(path); }
};

TEST_F(Checkpoint, ResumeSkipsFinishedCandidatesAndReproducesReport) {
  spnet::CheckOptions opt;
  opt.checkpoint = path.string();
  auto first = spnet::check_conjecture(5, opt);
  EXPECT_EQ(first.resumed, 0U);
  {
    std::ofstream torn(path, std::ios::app);
    torn << "{\"n\":5,\"bou";
  }
  auto second = spnet::check_conjecture(5, opt);
  EXPECT_EQ(second.resumed, 3U);
  EXPECT_EQ(spnet::check_report_to_json(first).dump(), spnet::check_report_to_json(second).dump());
}

TEST_F(Checkpoint, OtherBoundIsNotReused) {
  spnet::CheckOptions opt;
  opt.checkpoint = path.string();
  spnet::check_conjecture(4, opt);
  opt.bound = Rational(5, 4);
  auto r = spnet::check_conjecture(4, opt);
  EXPECT_EQ(r.resumed, 0U);
  EXPECT_EQ(r.counterexamples(), 1U);
}

TEST(Reports, ParallelRunMatchesSerial) {
  spnet::CheckOptions serial, parallel;
  parallel.jobs = 4;
  EXPECT_EQ(spnet::check_report_to_json(spnet::check_conjecture(5, serial)).dump(),
            spnet::check_report_to_json(spnet::check_conjecture(5, parallel)).dump());
}

TEST(Reports, CandidateJsonRoundTrip) {
  auto r = spnet::check_candidate(spnet::n_network(), Rational(5, 4));
  auto back = spnet::candidate_from_json(spnet::candidate_to_json(r));
  EXPECT_EQ(spnet::candidate_to_json(back).dump(), spnet::candidate_to_json(r).dump());
}

}  // namespace
