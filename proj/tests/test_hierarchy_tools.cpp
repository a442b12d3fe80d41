#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "hiershap/errors.hpp"
#include "hiershap/hierarchy_tools.hpp"
#include "hiershap/models.hpp"
#include "test_util.hpp"

using namespace hiershap;

namespace {

std::vector<int> sizes_of_children(const PartitionHierarchy& h, int id) {
  std::vector<int> out;
  for (int c : h.node(id).children) out.push_back(static_cast<int>(h.node(c).members.size()));
  return out;
}

}  // namespace

TEST(AxisAligned, FourByFourOneLevel) {
  const auto h = axis_aligned_hierarchy(4, 4, {2});
  EXPECT_TRUE(validate_hierarchy(h).ok());
  EXPECT_EQ(sizes_of_children(h, 0), (std::vector<int>{4, 4, 4, 4}));
  EXPECT_EQ(h.node(h.node(0).children[0]).members, (std::vector<int>{0, 1, 4, 5}));
  EXPECT_EQ(h.depth(), 2);
}

TEST(AxisAligned, FourByFourTwoLevels) {
  const auto h = axis_aligned_hierarchy(4, 4, {2, 2});
  EXPECT_TRUE(validate_hierarchy(h).ok());
  EXPECT_EQ(h.depth(), 2);
  for (int c : h.node(0).children) {
    for (int g : h.node(c).children) EXPECT_EQ(h.node(g).members.size(), 1u);
  }
}

TEST(AxisAligned, UnevenRemainderAbsorbed) {
  const auto h = axis_aligned_hierarchy(5, 5, {2});
  EXPECT_TRUE(validate_hierarchy(h).ok());
  EXPECT_EQ(sizes_of_children(h, 0), (std::vector<int>{4, 6, 6, 9}));
}

TEST(AxisAligned, EmptyGridListRejected) {
  EXPECT_THROW(axis_aligned_hierarchy(4, 4, {}), InvalidInput);
  EXPECT_THROW(axis_aligned_hierarchy(4, 4, {0}), InvalidInput);
}

TEST(AxisAligned, ValidOnAwkwardSizes) {
  for (int w : {1, 3, 7, 10}) {
    for (int h : {1, 2, 9}) {
      const auto tree = axis_aligned_hierarchy(w, h, {3, 2});
      EXPECT_TRUE(validate_hierarchy(tree).ok()) << w << "x" << h;
    }
  }
}

TEST(TProperty, ConstantScorerPasses) {
  ValueFunction vf(16, [](const CoalitionMask&) { return 3.0; });
  const auto h = axis_aligned_hierarchy(4, 4, {2, 2});
  for (double tau : {-1.0, 3.0}) EXPECT_TRUE(check_t_property(h, vf, tau).pass);
}

TEST(TProperty, MonotoneAdditivePasses) {
  std::mt19937_64 rng(3);
  std::vector<double> w(12);
  for (auto& v : w) v = std::uniform_real_distribution<double>(0, 1)(rng);
  auto vf = models::additive_game(w);
  for (int t = 0; t < 10; ++t) {
    const auto h = fixtures::random_hierarchy(12, 4, rng);
    for (double tau : {1e-12, 0.5, 1.5, 3.0}) EXPECT_TRUE(check_t_property(h, vf, tau).pass);
  }
}

TEST(TProperty, InfiniteThresholdsPass) {
  auto vf = fixtures::dense_random_game(8, 4);
  std::mt19937_64 rng(9);
  const auto h = fixtures::random_hierarchy(8, 3, rng);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(check_t_property(h, vf, -inf).pass);
  EXPECT_TRUE(check_t_property(h, vf, inf).pass);
}

TEST(TProperty, ReportsEveryViolation) {
  // Parent {0,1} scores 0, both children score 1.
  ValueFunction vf(4, [](const CoalitionMask& s) { return s.count() == 1 ? 1.0 : 0.0; });
  const auto h = PartitionHierarchy::balanced({2, 2});
  const auto r = check_t_property(h, vf, 0.5);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.violations.size(), 4u);
  EXPECT_EQ(r.pairs_checked, 4u);
  const auto j = to_json(r);
  EXPECT_EQ(j["violations"].size(), 4u);
  EXPECT_EQ(j["pass"], false);
}

TEST(TPropertyCounterexample, AxisFailsSemanticPasses) {
  const auto ce = t_property_counterexample();
  EXPECT_FALSE(ce.axis_report.pass);
  EXPECT_TRUE(ce.semantic_report.pass);
  ASSERT_GE(ce.diluted_parent, 0);
  bool named = false;
  for (const auto& v : ce.axis_report.violations) {
    if (v.parent == ce.diluted_parent) {
      named = true;
      EXPECT_DOUBLE_EQ(v.parent_score, 65.0);
      EXPECT_DOUBLE_EQ(v.child_score, 200.0);
    }
  }
  EXPECT_TRUE(named);
  EXPECT_EQ(ce.tau, 100.0);
}

TEST(TPropertyCounterexample, Deterministic) {
  const auto a = t_property_counterexample();
  const auto b = t_property_counterexample();
  EXPECT_EQ(to_json(a.axis_report), to_json(b.axis_report));
  EXPECT_EQ(to_json(a.semantic_report), to_json(b.semantic_report));
  EXPECT_EQ(a.semantic_hierarchy, b.semantic_hierarchy);
}
