#include <gtest/gtest.h>

#include <cmath>

#include "spectree/generators.hpp"
#include "spectree/selfmap.hpp"

using namespace spectree;

TEST(SelfMap, IdentityProfile) {
  const auto t = build_bary(2, 3);
  const auto p = analyze(t, identity_map(t));
  EXPECT_TRUE(p.injective);
  EXPECT_EQ(p.max_multiplicity, 1u);
  EXPECT_TRUE(p.surjective_on_truncation);
  EXPECT_EQ(p.fixed_points.size(), t.size());
}

TEST(SelfMap, ParentMapProfile) {
  const auto t = build_bary(2, 2);
  const auto phi = parent_map(t);
  const auto p = analyze(t, phi);
  EXPECT_FALSE(p.injective);
  EXPECT_EQ(p.max_multiplicity, 3u);
  ASSERT_EQ(p.fixed_points.size(), 1u);
  EXPECT_EQ(p.fixed_points[0], t.root());
  EXPECT_EQ(p.preimages[0].size(), 3u);
  EXPECT_EQ(p.non_hit.size(), 4u);
}

TEST(SelfMap, ParentOnPath) {
  const auto t = build_bary(1, 3);
  const auto phi = parent_map(t);
  EXPECT_EQ(phi(t.root()), t.root());
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(phi(t.level(k)[0]), t.level(k - 1)[0]);
  EXPECT_EQ(phi.kind(), MapKind::parent);
}

TEST(SelfMap, LevelShift) {
  const auto t = build_bary(2, 5);
  const auto phi = level_shift_map(t, 2);
  const VertexId v = t.level(5)[13];
  const VertexId a = phi(v);
  EXPECT_EQ(t.depth(a), 3u);
  EXPECT_EQ(t.distance(a, v), 2u);
  EXPECT_EQ(phi(t.level(1)[1]), t.root());
}

TEST(SelfMap, DepthSquareOnBinaryDepthNine) {
  const auto t = build_bary(2, 9);
  const auto phi = depth_square_map(t);
  EXPECT_EQ(phi.effective_domain_depth(), 3u);
  EXPECT_FALSE(phi.is_total());
  EXPECT_EQ(phi(t.root()), t.root());
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(phi(t.level(1)[i]), t.level(1)[i]);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(phi(t.level(3)[i]), t.level(9)[i]);
  EXPECT_FALSE(phi.defined(t.level(4)[0]));

  const auto w = reciprocal_depth_weight(t);
  const VertexId v = t.level(3)[2];
  EXPECT_DOUBLE_EQ(w[v] / w[phi(v)], 2.5);

  const auto p = analyze(t, phi);
  EXPECT_TRUE(p.injective);
  EXPECT_EQ(p.fixed_points.size(), 3u);  // root + both depth-1 vertices
}

TEST(SelfMap, DepthSquareErrors) {
  const auto t = build_bary(2, 9);
  EXPECT_THROW(depth_square_map(t, 4), ValidationError);
  // Level 4 has a single vertex but level 2 has two.
  const auto lopsided = load_tree({{"r", std::nullopt},
                                   {"a", "r"},
                                   {"b", "r"},
                                   {"a1", "a"},
                                   {"b1", "b"},
                                   {"a2", "a1"},
                                   {"a3", "a2"},
                                   {"b2", "b1"},
                                   {"a4", "a3"}});
  EXPECT_THROW(depth_square_map(lopsided), ValidationError);
}

TEST(SelfMap, LoadMap) {
  const auto t = load_tree({{"r", std::nullopt}, {"a", "r"}, {"b", "r"}});
  const auto phi = load_map(t, {{"r", "r"}, {"a", "b"}, {"b", "a"}});
  EXPECT_EQ(phi(*t.find("a")), *t.find("b"));
  EXPECT_TRUE(analyze(t, phi).surjective_on_truncation);
  EXPECT_THROW(load_map(t, {{"r", "r"}, {"a", "zz"}, {"b", "a"}}), ValidationError);
  EXPECT_THROW(load_map(t, {{"r", "r"}, {"a", "b"}}), ValidationError);
}

TEST(SelfMap, TotalMapRejectsOutOfRangeImage) {
  EXPECT_THROW(SelfMap({VertexId{0}, VertexId{5}}), ValidationError);
}

TEST(Adversary, ConstantWeightHasNone) {
  const auto t = build_bary(2, 4);
  EXPECT_FALSE(adversary_unbounded(t, constant_weight(t, 1.0)).has_value());
  EXPECT_FALSE(adversary_vanishing(t, constant_weight(t, 1.0)).has_value());
  EXPECT_FALSE(adversary_unbounded(t, constant_weight(t, 0.5)).has_value());
  EXPECT_FALSE(adversary_vanishing(t, constant_weight(t, 3.0)).has_value());
}

TEST(Adversary, UnboundedTwoVertexExample) {
  const auto t = build_bary(1, 1);
  const Weight w({9.0, 2.0});
  const auto adv = adversary_unbounded(t, w);
  ASSERT_TRUE(adv.has_value());
  EXPECT_EQ(adv->map(VertexId{0}), VertexId{1});
  EXPECT_GE(adv->best_ratio, 4.5);
  EXPECT_TRUE(analyze(t, adv->map).injective);
}

TEST(Adversary, UnboundedGeometricFourOnPath) {
  const auto t = build_bary(1, 4);
  const auto adv = adversary_unbounded(t, geometric_weight(t, 4.0));
  ASSERT_TRUE(adv.has_value());
  EXPECT_GE(adv->best_ratio, 64.0);
  // 4^4 > (4^1)^2: the depth-4 vertex and a depth-1 vertex both qualify.
  const auto first = adv->pairs.front();
  EXPECT_EQ(t.depth(first.first), 4u);
  EXPECT_TRUE(analyze(t, adv->map).injective);
}

TEST(Adversary, VanishingTwoVertexExample) {
  const auto t = build_bary(1, 1);
  const Weight w({0.1, 0.005});
  const auto adv = adversary_vanishing(t, w);
  ASSERT_TRUE(adv.has_value());
  EXPECT_EQ(adv->map(VertexId{0}), VertexId{1});
  EXPECT_NEAR(adv->best_ratio, 20.0, 1e-12);
  EXPECT_GT(adv->best_ratio, 1.0 / 0.1);
}

TEST(Adversary, VanishingGeometricQuarterOnPath) {
  const auto t = build_bary(1, 4);
  const auto w = geometric_weight(t, 0.25);
  const auto adv = adversary_vanishing(t, w);
  ASSERT_TRUE(adv.has_value());
  // Greedy pairs root -> depth 4 first, then depth 1 -> depth 3 (ratio 16).
  ASSERT_EQ(adv->pairs.size(), 2u);
  EXPECT_EQ(adv->map(t.level(1)[0]), t.level(3)[0]);
  EXPECT_DOUBLE_EQ(w[t.level(1)[0]] / w[t.level(3)[0]], 16.0);
  EXPECT_DOUBLE_EQ(adv->best_ratio, 256.0);
}

TEST(Adversary, RandomWeightsGiveInjectiveMaps) {
  gen::Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = gen::random_bary_tree(rng, 300);
    const auto w = gen::random_weight(rng, t);
    for (const auto& adv : {adversary_unbounded(t, w), adversary_vanishing(t, w)}) {
      if (!adv) continue;
      const auto p = analyze(t, adv->map);
      EXPECT_TRUE(p.injective);
      EXPECT_TRUE(p.surjective_on_truncation);
      EXPECT_GT(adv->best_ratio, 1.0);
    }
  }
}

TEST(SelfMapProperties, PreimagesPartitionTheDomain) {
  gen::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = gen::random_irregular_tree(rng, 5, 3, 300);
    const auto phi = gen::random_bounded_multiplicity_map(rng, t, 1 + trial % 4);
    const auto p = analyze(t, phi);
    std::vector<int> seen(t.size(), 0);
    std::size_t total = 0;
    for (std::uint32_t u = 0; u < t.size(); ++u) {
      for (VertexId v : p.preimages[u]) {
        EXPECT_EQ(phi(v), VertexId{u});
        ++seen[v.index];
      }
      total += p.preimages[u].size();
    }
    EXPECT_EQ(total, t.size());
    for (int c : seen) EXPECT_EQ(c, 1);
    EXPECT_EQ(p.injective, p.max_multiplicity <= 1);
    for (VertexId v : p.fixed_points) EXPECT_EQ(phi(v), v);
  }
}
