#include <gtest/gtest.h>

#include <random>

#include "spectree/generators.hpp"
#include "spectree/tree.hpp"

using namespace spectree;

TEST(Tree, BinaryDepthThreeHasFifteenVertices) {
  const auto t = build_bary(2, 3);
  EXPECT_EQ(t.size(), 15u);
  EXPECT_EQ(t.level_size(3), 8u);
  EXPECT_EQ(t.truncation_depth(), 3u);
  EXPECT_TRUE(t.terminal_violations().empty());
}

TEST(Tree, UnaryTreeIsAPath) {
  const auto t = build_bary(1, 5);
  EXPECT_EQ(t.size(), 6u);
  for (std::size_t k = 0; k <= 5; ++k) EXPECT_EQ(t.level_size(k), 1u);
}

TEST(Tree, TernaryDepthTwoDegrees) {
  const auto t = build_bary(3, 2);
  EXPECT_EQ(t.size(), 13u);
  EXPECT_EQ(t.degree(t.root()), 3u);
  for (VertexId v : t.level(1)) EXPECT_EQ(t.degree(v), 4u);
  for (VertexId v : t.level(2)) EXPECT_EQ(t.degree(v), 1u);
}

TEST(Tree, ZeroBranchingRejected) { EXPECT_THROW(build_bary(0, 3), ValidationError); }

TEST(Tree, DepthZeroIsRootOnly) {
  const auto t = build_bary(4, 0);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.truncation_depth(), 0u);
}

TEST(Tree, CappedBranchingKeepsLevelsMonotone) {
  const auto t = build_bary_capped(2, 9, 3);
  for (std::size_t d = 0; d <= 3; ++d) EXPECT_EQ(t.level_size(d), std::size_t{1} << d);
  for (std::size_t d = 4; d <= 9; ++d) EXPECT_EQ(t.level_size(d), 8u);
  EXPECT_TRUE(t.terminal_violations().empty());
}

TEST(Tree, LoadThreeVertexPath) {
  const auto t = load_tree({{"a", std::nullopt}, {"b", "a"}, {"c", "b"}});
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.depth(*t.find("a")), 0u);
  EXPECT_EQ(t.depth(*t.find("b")), 1u);
  EXPECT_EQ(t.depth(*t.find("c")), 2u);
}

TEST(Tree, LoadSelfParentIsCycle) {
  try {
    load_tree({{"r", std::nullopt}, {"x", "x"}});
    FAIL() << "expected a cycle error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
  }
}

TEST(Tree, LoadTwoCycleDetected) {
  EXPECT_THROW(load_tree({{"r", std::nullopt}, {"x", "y"}, {"y", "x"}}), ValidationError);
}

TEST(Tree, LoadErrors) {
  EXPECT_THROW(load_tree({{"r", std::nullopt}, {"s", std::nullopt}}), ValidationError);
  EXPECT_THROW(load_tree({{"r", std::nullopt}, {"x", "nowhere"}}), ValidationError);
  EXPECT_THROW(load_tree({{"r", std::nullopt}, {"r", "r"}}), ValidationError);
  EXPECT_THROW(load_tree({{"x", "y"}, {"y", "x"}}), ValidationError);
  EXPECT_THROW(load_tree({}), ValidationError);
}

TEST(Tree, LoadRootFirstThenDocumentOrder) {
  // Root listed last still receives index 0.
  const auto t = load_tree({{"a", "r"}, {"b", "r"}, {"c", "a"}, {"r", std::nullopt}});
  EXPECT_EQ(t.label(VertexId{0}), "r");
  EXPECT_EQ(t.label(VertexId{1}), "a");
  std::vector<std::size_t> profile;
  for (std::size_t d = 0; d <= t.truncation_depth(); ++d) profile.push_back(t.level_size(d));
  EXPECT_EQ(profile, (std::vector<std::size_t>{1, 2, 1}));
  // "b" has no children above the frontier: accepted, flagged.
  ASSERT_EQ(t.terminal_violations().size(), 1u);
  EXPECT_EQ(t.label(t.terminal_violations()[0]), "b");
}

TEST(Tree, Distances) {
  const auto t = build_bary(2, 3);
  const VertexId deep = t.level(3)[5];
  EXPECT_EQ(t.distance(deep, deep), 0u);
  EXPECT_EQ(t.distance(t.root(), deep), 3u);
  EXPECT_EQ(t.distance(t.level(1)[0], t.level(1)[1]), 2u);
  EXPECT_EQ(t.distance(t.level(3)[0], t.level(3)[7]), 6u);
  EXPECT_EQ(t.distance(t.level(3)[0], t.level(3)[1]), 2u);
  EXPECT_THROW(t.distance(VertexId{99}, deep), std::out_of_range);
}

TEST(Tree, LevelsAreLexicographic) {
  const auto t = build_bary(2, 3);
  EXPECT_EQ(t.level_size(2), 4u);
  EXPECT_EQ(t.level(0).size(), 1u);
  EXPECT_TRUE(t.level(7).empty());
  // Children of the first depth-1 vertex precede those of the second.
  const auto l2 = t.level(2);
  EXPECT_EQ(t.parent(l2[0]), t.level(1)[0]);
  EXPECT_EQ(t.parent(l2[1]), t.level(1)[0]);
  EXPECT_EQ(t.parent(l2[2]), t.level(1)[1]);
}

TEST(Tree, LexicographicOrderForDocumentTrees) {
  // Document order interleaves subtrees; levels still follow root paths.
  const auto t = load_tree({{"r", std::nullopt}, {"a", "r"}, {"b", "r"}, {"b1", "b"}, {"a1", "a"}});
  const auto l2 = t.level(2);
  ASSERT_EQ(l2.size(), 2u);
  EXPECT_EQ(t.label(l2[0]), "a1");
  EXPECT_EQ(t.label(l2[1]), "b1");
}

TEST(Tree, TruncateKeepsShallowVertices) {
  const auto t = build_bary(2, 4);
  const auto cut = truncate(t, 2);
  EXPECT_EQ(cut.tree.size(), 7u);
  EXPECT_EQ(cut.tree.truncation_depth(), 2u);
  EXPECT_FALSE(cut.to_new[t.level(3)[0].index].has_value());
}

// Property checks over random trees.
TEST(TreeProperties, DepthParentAndLevelSums) {
  gen::Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto t = trial % 2 ? gen::random_bary_tree(rng, 500) : gen::random_irregular_tree(rng, 5, 3, 400);
    std::size_t total = 0;
    for (std::size_t d = 0; d <= t.truncation_depth(); ++d) total += t.level_size(d);
    EXPECT_EQ(total, t.size());
    for (std::uint32_t i = 1; i < t.size(); ++i) {
      const VertexId v{i};
      EXPECT_EQ(t.distance(t.root(), v), t.depth(v));
      EXPECT_EQ(t.depth(*t.parent(v)) + 1, t.depth(v));
    }
    EXPECT_TRUE(t.terminal_violations().empty());
  }
}

TEST(TreeProperties, DocumentRoundTripPreservesParents) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = gen::random_bary_tree(rng, 400);
    const auto back = load_tree(tree_document(t));
    ASSERT_EQ(back.size(), t.size());
    for (std::uint32_t i = 0; i < t.size(); ++i) {
      const VertexId v{i};
      const VertexId w = *back.find(t.label(v));
      const auto p = t.parent(v);
      const auto q = back.parent(w);
      ASSERT_EQ(p.has_value(), q.has_value());
      if (p) {
        EXPECT_EQ(back.label(*q), t.label(*p));
      }
    }
  }
}
