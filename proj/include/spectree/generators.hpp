#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "spectree/lpspace.hpp"
#include "spectree/selfmap.hpp"
#include "spectree/tree.hpp"
#include "spectree/weight.hpp"

// Seeded random instances for property suites.
namespace spectree::gen {

using Rng = std::mt19937_64;

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::size_t bary_vertex_count(std::size_t b, std::size_t depth) {
  std::size_t total = 0, level = 1;
  for (std::size_t d = 0; d <= depth; ++d, level *= b) total += level;
  return total;
}

/// Complete b-ary tree with b in [1, 4] and depth in [1, max_depth],
/// resampled until it has at most `max_vertices` vertices.
inline Tree random_bary_tree(Rng& rng, std::size_t max_vertices, std::size_t max_depth = 6) {
  for (;;) {
    const std::size_t b = uniform_index(rng, 1, 4);
    const std::size_t d = uniform_index(rng, 1, max_depth);
    if (bary_vertex_count(b, d) <= max_vertices) return build_bary(b, d);
  }
}

/// Terminal-free tree with 1..max_branching children per internal vertex;
/// growth stops early (shrinking the depth) to respect `max_vertices`.
inline Tree random_irregular_tree(Rng& rng, std::size_t depth, std::size_t max_branching,
                                  std::size_t max_vertices) {
  std::vector<std::optional<std::uint32_t>> parents{std::nullopt};
  std::vector<std::uint32_t> frontier{0};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<std::uint32_t> next;
    std::vector<std::optional<std::uint32_t>> added;
    for (std::uint32_t v : frontier) {
      const std::size_t k = uniform_index(rng, 1, max_branching);
      for (std::size_t c = 0; c < k; ++c) {
        next.push_back(static_cast<std::uint32_t>(parents.size() + added.size()));
        added.emplace_back(v);
      }
    }
    if (parents.size() + added.size() > max_vertices) break;
    parents.insert(parents.end(), added.begin(), added.end());
    frontier = std::move(next);
  }
  return Tree::from_parents(parents);
}

/// Independent uniform weights in [lo, hi].
inline Weight random_weight(Rng& rng, const Tree& t, double lo = 0.01, double hi = 100.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> values(t.size());
  for (auto& x : values) x = dist(rng);
  return Weight(std::move(values));
}

/// Uniformly random permutation of the vertex set (every injective
/// self-map of a finite set is one).
inline SelfMap random_bijection(Rng& rng, const Tree& t) {
  std::vector<VertexId> image(t.size());
  for (std::uint32_t i = 0; i < t.size(); ++i) image[i] = VertexId{i};
  std::shuffle(image.begin(), image.end(), rng);
  return SelfMap(std::move(image));
}

/// Random total map whose largest preimage has exactly `multiplicity`
/// elements (requires multiplicity <= vertex count).
inline SelfMap random_bounded_multiplicity_map(Rng& rng, const Tree& t, std::size_t multiplicity) {
  const std::size_t n = t.size();
  multiplicity = std::clamp<std::size_t>(multiplicity, 1, n);
  std::vector<std::uint32_t> sources(n), targets(n);
  std::iota(sources.begin(), sources.end(), 0u);
  std::iota(targets.begin(), targets.end(), 0u);
  std::shuffle(sources.begin(), sources.end(), rng);
  std::shuffle(targets.begin(), targets.end(), rng);
  std::vector<VertexId> image(n);
  std::size_t pos = 0, group = 0;
  while (pos < n) {
    const std::size_t size =
        std::min(n - pos, group == 0 ? multiplicity : uniform_index(rng, 1, multiplicity));
    for (std::size_t k = 0; k < size; ++k) image[sources[pos + k]] = VertexId{targets[group]};
    pos += size;
    ++group;
  }
  return SelfMap(std::move(image));
}

/// Complex function with standard normal real and imaginary parts.
inline TreeFunction random_function(Rng& rng, std::size_t n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  TreeFunction f(n);
  for (auto& x : f.values()) x = Scalar(gauss(rng), gauss(rng));
  return f;
}

/// Random exponent from {1, 1.5, 2, 3}.
inline Exponent random_exponent(Rng& rng) {
  static constexpr double choices[] = {1.0, 1.5, 2.0, 3.0};
  return Exponent(choices[uniform_index(rng, 0, 3)]);
}

} // namespace spectree::gen
