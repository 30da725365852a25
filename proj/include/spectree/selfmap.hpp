#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spectree/error.hpp"
#include "spectree/tree.hpp"
#include "spectree/weight.hpp"

namespace spectree {

enum class MapKind { identity, parent, level_shift, depth_square, adversary_unbounded, adversary_vanishing, custom };

inline std::string_view to_string(MapKind k) {
  switch (k) {
    case MapKind::identity: return "identity";
    case MapKind::parent: return "parent";
    case MapKind::level_shift: return "level_shift";
    case MapKind::depth_square: return "depth_square";
    case MapKind::adversary_unbounded: return "adversary_unbounded";
    case MapKind::adversary_vanishing: return "adversary_vanishing";
    case MapKind::custom: return "custom";
  }
  return "custom";
}

/// Self-map of the stored vertex set.
///
/// A map is normally total. The depth-squaring map is only defined on the
/// vertices of depth <= floor(sqrt(D)); for such maps `domain()` lists the
/// vertices where the map is defined and every operator quantity is taken
/// over that effective domain (C_phi f vanishes outside it).
class SelfMap {
public:
  /// Total map: `image[v]` is the image of vertex v.
  SelfMap(std::vector<VertexId> image, MapKind kind = MapKind::custom)
      : image_(std::move(image)), kind_(kind) {
    domain_.resize(image_.size());
    for (std::uint32_t i = 0; i < image_.size(); ++i) domain_[i] = VertexId{i};
    in_domain_.assign(image_.size(), true);
    validate();
  }

  /// Partial map defined on `domain` only.
  SelfMap(std::vector<VertexId> image, std::vector<VertexId> domain, MapKind kind,
          std::optional<std::size_t> effective_domain_depth = std::nullopt)
      : image_(std::move(image)), domain_(std::move(domain)), kind_(kind),
        effective_domain_depth_(effective_domain_depth) {
    std::sort(domain_.begin(), domain_.end());
    in_domain_.assign(image_.size(), false);
    for (VertexId v : domain_) {
      if (v.index >= image_.size()) throw ValidationError("map.domain", "vertex outside the tree");
      in_domain_[v.index] = true;
    }
    validate();
  }

  VertexId operator()(VertexId v) const {
    if (!defined(v)) throw std::out_of_range("map not defined at vertex " + std::to_string(v.index));
    return image_[v.index];
  }
  bool defined(VertexId v) const noexcept { return v.index < image_.size() && in_domain_[v.index]; }
  std::span<const VertexId> domain() const noexcept { return domain_; }
  bool is_total() const noexcept { return domain_.size() == image_.size(); }
  /// Vertex count of the tree the map acts on.
  std::size_t size() const noexcept { return image_.size(); }
  MapKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> effective_domain_depth() const noexcept { return effective_domain_depth_; }

private:
  void validate() const {
    for (VertexId v : domain_)
      if (image_[v.index].index >= image_.size())
        throw ValidationError("map[" + std::to_string(v.index) + "]", "image outside the vertex set");
  }

  std::vector<VertexId> image_;
  std::vector<VertexId> domain_;
  std::vector<bool> in_domain_;
  MapKind kind_;
  std::optional<std::size_t> effective_domain_depth_;
};

/// Structural facts about a map, from full enumeration of its domain.
struct MapProfile {
  bool injective = true;
  std::size_t max_multiplicity = 0;
  bool surjective_on_truncation = false;
  std::vector<VertexId> fixed_points;
  std::vector<VertexId> non_hit;
  /// preimages[u] lists every v in the domain with phi(v) = u, ascending.
  std::vector<std::vector<VertexId>> preimages;
};

inline MapProfile analyze(const Tree& t, const SelfMap& phi) {
  if (phi.size() != t.size()) throw ValidationError("map", "map and tree have different vertex counts");
  MapProfile out;
  out.preimages.assign(t.size(), {});
  for (VertexId v : phi.domain()) {
    const VertexId u = phi(v);
    out.preimages[u.index].push_back(v);
    if (u == v) out.fixed_points.push_back(v);
  }
  for (std::uint32_t u = 0; u < t.size(); ++u) {
    const std::size_t m = out.preimages[u].size();
    out.max_multiplicity = std::max(out.max_multiplicity, m);
    if (m == 0) out.non_hit.push_back(VertexId{u});
  }
  out.injective = out.max_multiplicity <= 1;
  out.surjective_on_truncation = out.non_hit.empty();
  return out;
}

inline SelfMap identity_map(const Tree& t) {
  std::vector<VertexId> image(t.size());
  for (std::uint32_t i = 0; i < t.size(); ++i) image[i] = VertexId{i};
  return SelfMap(std::move(image), MapKind::identity);
}

/// Sends each vertex to its ancestor k levels up, clamped at the root.
inline SelfMap level_shift_map(const Tree& t, std::size_t k) {
  std::vector<VertexId> image(t.size());
  for (std::uint32_t i = 0; i < t.size(); ++i) {
    const VertexId v{i};
    const std::size_t d = t.depth(v);
    image[i] = t.ancestor_at(v, d > k ? d - k : 0);
  }
  return SelfMap(std::move(image), k == 1 ? MapKind::parent : MapKind::level_shift);
}

/// Parent of every vertex; the root is fixed.
inline SelfMap parent_map(const Tree& t) { return level_shift_map(t, 1); }

inline std::size_t integer_sqrt(std::size_t x) {
  std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

/// Injective map sending the i-th vertex of level n to the i-th vertex of
/// level n^2, for every level n <= domain_depth (default floor(sqrt(D))).
///
/// Vertices deeper than the domain depth are outside the map's domain.
/// Throws ValidationError if the tree is too shallow for the requested
/// domain or a level n^2 holds fewer vertices than level n.
inline SelfMap depth_square_map(const Tree& t, std::optional<std::size_t> domain_depth = std::nullopt) {
  const std::size_t depth = t.truncation_depth();
  const std::size_t n_max = domain_depth.value_or(integer_sqrt(depth));
  if (n_max * n_max > depth)
    throw ValidationError("map.depth_square", "tree too shallow: domain depth " + std::to_string(n_max) +
                                                  " needs truncation depth " + std::to_string(n_max * n_max) +
                                                  ", tree has " + std::to_string(depth));
  std::vector<VertexId> image(t.size());
  std::vector<VertexId> domain;
  for (std::size_t n = 0; n <= n_max; ++n) {
    auto src = t.level(n);
    auto dst = t.level(n * n);
    if (dst.size() < src.size())
      throw ValidationError("map.depth_square", "level " + std::to_string(n * n) + " has fewer vertices than level " +
                                                    std::to_string(n) + " (level sizes not monotone)");
    for (std::size_t i = 0; i < src.size(); ++i) {
      image[src[i].index] = dst[i];
      domain.push_back(src[i]);
    }
  }
  return SelfMap(std::move(image), std::move(domain), MapKind::depth_square, n_max);
}

/// Total map from (vertex id, image id) pairs.
inline SelfMap load_map(const Tree& t, const std::vector<std::pair<std::string, std::string>>& doc) {
  std::vector<VertexId> image(t.size());
  std::vector<bool> assigned(t.size(), false);
  for (const auto& [from, to] : doc) {
    auto v = t.find(from);
    if (!v) throw ValidationError("map." + from, "not a vertex of the tree");
    auto u = t.find(to);
    if (!u) throw ValidationError("map." + from, "image '" + to + "' outside the vertex set");
    if (assigned[v->index]) throw ValidationError("map." + from, "assigned twice");
    image[v->index] = *u;
    assigned[v->index] = true;
  }
  for (std::uint32_t i = 0; i < t.size(); ++i)
    if (!assigned[i]) throw ValidationError("map." + t.label(VertexId{i}), "missing image for vertex");
  return SelfMap(std::move(image));
}

/// Injective map built from disjoint transpositions (source <-> target),
/// identity elsewhere.
struct Adversary {
  SelfMap map;
  /// (source, target) pairs with phi(source) = target, best ratio first.
  std::vector<std::pair<VertexId, VertexId>> pairs;
  /// Largest lambda(source)/lambda(target) among the pairs.
  double best_ratio = 0.0;
};

namespace detail {

template <class Accept>
std::optional<Adversary> greedy_transpositions(const Weight& w, MapKind kind, Accept accept) {
  const std::size_t n = w.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return w.values()[a] < w.values()[b]; });

  std::vector<VertexId> image(n);
  for (std::uint32_t i = 0; i < n; ++i) image[i] = VertexId{i};
  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::size_t lo = 0, hi = n == 0 ? 0 : n - 1;
  // The heaviest unused vertex against the lightest unused one maximizes the
  // ratio; if that pair fails the (monotone) acceptance test every remaining
  // pair fails too.
  while (lo < hi) {
    const VertexId heavy{order[hi]}, light{order[lo]};
    if (!accept(w[heavy], w[light])) break;
    image[heavy.index] = light;
    image[light.index] = heavy;
    pairs.emplace_back(heavy, light);
    ++lo;
    --hi;
  }
  if (pairs.empty()) return std::nullopt;
  const double best = w[pairs.front().first] / w[pairs.front().second];
  return Adversary{SelfMap(std::move(image), kind), std::move(pairs), best};
}

} // namespace detail

/// Injection witnessing an unbounded-above weight: pairs heavy vertices w
/// with light vertices v such that lambda(w) > lambda(v)^2 and
/// lambda(w) > lambda(v), mapping w -> v (and v -> w to stay injective).
/// Returns nullopt when no pair qualifies.
inline std::optional<Adversary> adversary_unbounded(const Tree& t, const Weight& w) {
  if (w.size() != t.size()) throw ValidationError("weight", "weight and tree have different vertex counts");
  return detail::greedy_transpositions(w, MapKind::adversary_unbounded, [](double heavy, double light) {
    return heavy > light && heavy > light * light;
  });
}

/// Injection witnessing a weight that is not bounded away from zero: maps
/// vertices v' to light vertices u with lambda(u) < lambda(v')^2 and
/// lambda(u) < lambda(v'), so the ratio exceeds 1/lambda(v').
inline std::optional<Adversary> adversary_vanishing(const Tree& t, const Weight& w) {
  if (w.size() != t.size()) throw ValidationError("weight", "weight and tree have different vertex counts");
  return detail::greedy_transpositions(w, MapKind::adversary_vanishing, [](double heavy, double light) {
    return light < heavy && light < heavy * heavy;
  });
}

} // namespace spectree
