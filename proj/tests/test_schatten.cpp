#include <gtest/gtest.h>

#include <cmath>

#include "spectree/generators.hpp"
#include "spectree/schatten.hpp"

using namespace spectree;

TEST(Schatten, IdentitySpectrum) {
  gen::Rng rng(1);
  const auto t = build_bary(2, 2);
  const OperatorSpec s(t, gen::random_weight(rng, t), identity_map(t), Exponent(2));
  const auto mu = singular_values_analytic(s);
  ASSERT_EQ(mu.size(), 7u);
  for (double x : mu) EXPECT_NEAR(x, 1.0, 1e-15);
  EXPECT_NEAR(hs_norm(s), std::sqrt(7.0), 1e-14);
  for (double q : {1.0, 2.5, 4.0}) EXPECT_NEAR(schatten_sum(s, q).diagonal_sum, 7.0, 1e-13);
  const auto tr = trace_diagonal(s);
  EXPECT_EQ(tr.fixed_point_count, 7u);
  EXPECT_TRUE(tr.agree);
}

TEST(Schatten, ParentMapBinaryDepthTwo) {
  const auto t = build_bary(2, 2);
  const OperatorSpec s(t, constant_weight(t, 1.0), parent_map(t), Exponent(2));
  const auto mu = singular_values_analytic(s);
  const std::vector<double> expected{std::sqrt(3.0), std::sqrt(2.0), std::sqrt(2.0), 0, 0, 0, 0};
  ASSERT_EQ(mu.size(), expected.size());
  for (std::size_t i = 0; i < mu.size(); ++i) EXPECT_DOUBLE_EQ(mu[i], expected[i]);
  EXPECT_DOUBLE_EQ(hs_norm(s), std::sqrt(7.0));
  const auto tr = trace_diagonal(s);
  EXPECT_EQ(tr.fixed_point_count, 1u);
  EXPECT_TRUE(tr.agree);
}

TEST(Schatten, GeometricParentOnPathClosedForm) {
  for (double c : {0.25, 0.5, 2.0}) {
    for (std::size_t depth : {1u, 4u, 8u}) {
      const auto t = build_bary(1, depth);
      const OperatorSpec s(t, geometric_weight(t, c), parent_map(t), Exponent(2));
      const auto mu = singular_values_analytic(s);
      std::vector<double> expected{std::sqrt(1 + c)};
      for (std::size_t k = 1; k < depth; ++k) expected.push_back(std::sqrt(c));
      expected.push_back(0.0);
      std::sort(expected.begin(), expected.end(), std::greater<>());
      ASSERT_EQ(mu.size(), expected.size());
      for (std::size_t i = 0; i < mu.size(); ++i) EXPECT_NEAR(mu[i], expected[i], 1e-14);
      EXPECT_NEAR(hs_norm(s), std::sqrt(1 + static_cast<double>(depth) * c), 1e-14);
    }
  }
}

TEST(Schatten, SumAtQOne) {
  const auto t = build_bary(1, 8);
  const OperatorSpec s(t, geometric_weight(t, 0.25), parent_map(t), Exponent(2));
  const auto sum = schatten_sum(s, 1.0);
  const double expected = std::sqrt(1.25) + 7 * 0.5;
  EXPECT_NEAR(sum.diagonal_sum, expected, 1e-14);
  EXPECT_NEAR(sum.singular_value_sum, expected, 1e-14);
  EXPECT_NEAR(schatten_sum(s, 2.0).diagonal_sum, hs_norm(s) * hs_norm(s), 1e-13);
}

TEST(Schatten, TraceOfDepthSquareMap) {
  const auto t = build_bary_capped(3, 9, 3);
  const OperatorSpec s(t, reciprocal_depth_weight(t), depth_square_map(t), Exponent(2));
  const auto tr = trace_diagonal(s);
  EXPECT_EQ(tr.fixed_point_count, 1 + t.level_size(1));
  EXPECT_TRUE(tr.agree);
}

TEST(Schatten, RejectsNonHilbertExponent) {
  const auto t = build_bary(2, 2);
  const OperatorSpec s(t, constant_weight(t, 1.0), identity_map(t), Exponent(3));
  EXPECT_THROW(singular_values_analytic(s), DomainError);
  EXPECT_THROW(hs_norm(s), DomainError);
  EXPECT_THROW(trace_diagonal(s), DomainError);
  const OperatorSpec h(t, constant_weight(t, 1.0), identity_map(t), Exponent(2));
  EXPECT_THROW(schatten_sum(h, 0.5), DomainError);
}

TEST(Schatten, PartialSumVerdicts) {
  const std::size_t depths[] = {4, 8, 16};
  const double flat[] = {1.5, 1.75, 1.75};
  EXPECT_EQ(classify_partial_sums(depths, flat), Convergence::converging);
  const double linear[] = {4.0, 8.0, 16.0};
  EXPECT_EQ(classify_partial_sums(depths, linear), Convergence::diverging);
  const double slowing[] = {1.0, 2.0, 2.5};
  EXPECT_EQ(classify_partial_sums(depths, slowing), Convergence::inconclusive);
  const double two[] = {1.0, 2.0};
  EXPECT_EQ(classify_partial_sums(std::span(depths, 2), two), Convergence::inconclusive);
}

TEST(SchattenProperties, Identities) {
  gen::Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const auto t = gen::random_irregular_tree(rng, 5, 3, 400);
    const OperatorSpec s(t, gen::random_weight(rng, t), gen::random_bounded_multiplicity_map(rng, t, 1 + trial % 4),
                         Exponent(2));
    const auto mu = singular_values_analytic(s);
    ASSERT_TRUE(std::is_sorted(mu.begin(), mu.end(), std::greater<>()));
    double sq = 0.0;
    for (double x : mu) {
      EXPECT_GE(x, 0.0);
      sq += x * x;
    }
    const double hs = hs_norm(s);
    EXPECT_NEAR(hs * hs, sq, 1e-10 * sq);
    EXPECT_NEAR(schatten_sum(s, 2.0).diagonal_sum, hs * hs, 1e-10 * sq);
    EXPECT_NEAR(mu.front(), norm_exact(s).value, 1e-10 * mu.front());
    for (double q : {1.0, 1.5, 3.0}) {
      const auto sum = schatten_sum(s, q);
      EXPECT_NEAR(sum.diagonal_sum, sum.singular_value_sum, 1e-10 * sum.diagonal_sum);
    }
    EXPECT_TRUE(trace_diagonal(s).agree);
  }
}

TEST(SchattenProperties, ContractiveSumsDecreaseInQ) {
  gen::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = gen::random_bary_tree(rng, 300);
    // Parent map off the root with children lighter than 1/b of the parent:
    // every diagonal ratio is at most 1.
    std::size_t b = std::max<std::size_t>(1, t.degree(t.root()));
    std::vector<VertexId> image(t.size(), t.root()), domain;
    for (std::uint32_t i = 1; i < t.size(); ++i) {
      image[i] = *t.parent(VertexId{i});
      domain.push_back(VertexId{i});
    }
    if (domain.empty()) continue;
    const OperatorSpec s(t, geometric_weight(t, 0.5 / static_cast<double>(b)),
                         SelfMap(image, domain, MapKind::custom), Exponent(2));
    for (double mu : singular_values_analytic(s)) ASSERT_LE(mu, 1.0 + 1e-15);
    EXPECT_LE(schatten_sum(s, 3.0).diagonal_sum, schatten_sum(s, 2.0).diagonal_sum + 1e-12);
    EXPECT_LE(schatten_sum(s, 2.0).diagonal_sum, schatten_sum(s, 1.0).diagonal_sum + 1e-12);
  }
}

TEST(SchattenProperties, PartialSumsGrowWithDepth) {
  for (double q : {1.0, 2.0, 3.0}) {
    double prev = 0.0;
    for (std::size_t depth = 1; depth <= 7; ++depth) {
      const auto t = build_bary(2, depth);
      const OperatorSpec s(t, geometric_weight(t, 0.25), parent_map(t), Exponent(2));
      const double sum = schatten_sum(s, q).diagonal_sum;
      EXPECT_GE(sum, prev);
      prev = sum;
    }
  }
}
