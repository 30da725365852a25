#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "spectree/error.hpp"

namespace spectree {

/// Dense vertex index; 0 is always the root of the owning tree.
struct VertexId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(VertexId, VertexId) = default;
};

/// Finite truncation of a rooted, locally finite tree.
///
/// Vertices are stored densely with the root at index 0. Every vertex has a
/// depth (edge distance to the root) no greater than the truncation depth.
/// Each level is kept in lexicographic order of the root path, so "the i-th
/// vertex at level n" is well defined. Trees are immutable once built.
class Tree {
public:
  /// Builds a tree from a parent table; `parents[0]` must be empty (the
  /// root), every other entry must name an existing vertex. Children are
  /// ordered by their index. Throws ValidationError on cycles, multiple
  /// roots or dangling parents.
  static Tree from_parents(const std::vector<std::optional<std::uint32_t>>& parents,
                           std::vector<std::string> labels = {}) {
    const std::size_t n = parents.size();
    if (n == 0) throw ValidationError("tree", "no vertices");
    if (labels.size() != 0 && labels.size() != n)
      throw ValidationError("tree", "label count does not match vertex count");
    if (parents[0].has_value()) throw ValidationError("tree", "vertex 0 must be the root");

    Tree t;
    t.parent_.assign(n, 0);
    t.children_.assign(n, {});
    t.depth_.assign(n, 0);
    t.labels_ = std::move(labels);
    for (std::size_t i = 1; i < n; ++i) {
      if (!parents[i].has_value())
        throw ValidationError(t.label_or_index(i), "multiple roots");
      const std::uint32_t p = *parents[i];
      if (p >= n) throw ValidationError(t.label_or_index(i), "parent references unknown vertex");
      if (p == i) throw ValidationError(t.label_or_index(i), "cycle: vertex is its own parent");
      t.parent_[i] = p;
      t.children_[p].push_back(VertexId{static_cast<std::uint32_t>(i)});
    }
    t.finish();
    return t;
  }

  std::size_t size() const noexcept { return parent_.size(); }
  std::size_t truncation_depth() const noexcept { return levels_.size() - 1; }
  VertexId root() const noexcept { return VertexId{0}; }
  bool contains(VertexId v) const noexcept { return v.index < size(); }

  std::optional<VertexId> parent(VertexId v) const {
    check(v);
    if (v.index == 0) return std::nullopt;
    return VertexId{parent_[v.index]};
  }
  std::span<const VertexId> children(VertexId v) const {
    check(v);
    return children_[v.index];
  }
  std::size_t depth(VertexId v) const {
    check(v);
    return depth_[v.index];
  }
  /// Number of neighbours (children plus parent).
  std::size_t degree(VertexId v) const {
    return children(v).size() + (v.index == 0 ? 0 : 1);
  }

  /// Vertices at depth `n` in lexicographic root-path order; empty when
  /// `n` exceeds the truncation depth.
  std::span<const VertexId> level(std::size_t n) const noexcept {
    if (n >= levels_.size()) return {};
    return levels_[n];
  }
  std::size_t level_size(std::size_t n) const noexcept { return level(n).size(); }

  /// Vertices above the frontier that have no children. Generated trees
  /// never have any; documents may describe ad hoc truncations that do.
  std::span<const VertexId> terminal_violations() const noexcept { return terminal_violations_; }

  /// External name of a vertex (document id, or the decimal index).
  std::string label(VertexId v) const {
    check(v);
    return label_or_index(v.index);
  }
  bool has_labels() const noexcept { return !labels_.empty(); }

  std::optional<VertexId> find(const std::string& label) const {
    if (labels_.empty()) {
      try {
        std::size_t pos = 0;
        const unsigned long idx = std::stoul(label, &pos);
        if (pos == label.size() && idx < size()) return VertexId{static_cast<std::uint32_t>(idx)};
      } catch (const std::exception&) {
      }
      return std::nullopt;
    }
    auto it = label_index_.find(label);
    if (it == label_index_.end()) return std::nullopt;
    return VertexId{it->second};
  }

  /// Edge count of the unique path between `u` and `v`.
  std::size_t distance(VertexId u, VertexId v) const {
    check(u);
    check(v);
    std::size_t steps = 0;
    std::uint32_t a = u.index, b = v.index;
    while (depth_[a] > depth_[b]) a = parent_[a], ++steps;
    while (depth_[b] > depth_[a]) b = parent_[b], ++steps;
    while (a != b) a = parent_[a], b = parent_[b], steps += 2;
    return steps;
  }

  /// Ancestor of `v` at depth `target_depth` (v itself when already there).
  VertexId ancestor_at(VertexId v, std::size_t target_depth) const {
    check(v);
    std::uint32_t a = v.index;
    while (depth_[a] > target_depth) a = parent_[a];
    return VertexId{a};
  }

private:
  Tree() = default;

  void check(VertexId v) const {
    if (!contains(v)) throw std::out_of_range("vertex index " + std::to_string(v.index) + " out of range");
  }

  std::string label_or_index(std::size_t i) const {
    return labels_.empty() ? std::to_string(i) : labels_[i];
  }

  // Depths and lexicographic levels via preorder DFS; any vertex not reached
  // from the root sits on a parent cycle.
  void finish() {
    const std::size_t n = parent_.size();
    std::vector<bool> seen(n, false);
    std::vector<std::uint32_t> stack{0};
    std::size_t reached = 0;
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      seen[v] = true;
      ++reached;
      if (depth_[v] >= levels_.size()) levels_.resize(depth_[v] + 1);
      levels_[depth_[v]].push_back(VertexId{v});
      for (auto it = children_[v].rbegin(); it != children_[v].rend(); ++it) {
        depth_[it->index] = depth_[v] + 1;
        stack.push_back(it->index);
      }
    }
    if (reached != n) {
      for (std::size_t i = 0; i < n; ++i)
        if (!seen[i]) throw ValidationError(label_or_index(i), "cycle: vertex not reachable from root");
    }
    for (std::uint32_t i = 0; i < labels_.size(); ++i)
      if (!label_index_.emplace(labels_[i], i).second)
        throw ValidationError(labels_[i], "duplicate vertex label");
    const std::size_t frontier = levels_.size() - 1;
    for (std::uint32_t i = 0; i < n; ++i)
      if (children_[i].empty() && depth_[i] < frontier) terminal_violations_.push_back(VertexId{i});
  }

  std::vector<std::uint32_t> parent_;
  std::vector<std::vector<VertexId>> children_;
  std::vector<std::size_t> depth_;
  std::vector<std::vector<VertexId>> levels_;
  std::vector<VertexId> terminal_violations_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> label_index_;
};

/// Tree where every vertex above depth `branch_depth` has `branching`
/// children and every vertex from `branch_depth` down to `depth` has one.
/// Leaves all sit at `depth`. Level sizes are nondecreasing with depth.
inline Tree build_bary_capped(std::size_t branching, std::size_t depth, std::size_t branch_depth) {
  if (branching == 0) throw ValidationError("branching", "must be at least 1 (terminal-free root)");
  std::vector<std::optional<std::uint32_t>> parents{std::nullopt};
  std::size_t level_begin = 0, level_end = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    const std::size_t fan = d < branch_depth ? branching : 1;
    for (std::size_t v = level_begin; v < level_end; ++v)
      for (std::size_t c = 0; c < fan; ++c) {
        if (parents.size() >= std::numeric_limits<std::uint32_t>::max())
          throw ValidationError("tree", "vertex count exceeds 32-bit index range");
        parents.emplace_back(static_cast<std::uint32_t>(v));
      }
    level_begin = level_end;
    level_end = parents.size();
  }
  return Tree::from_parents(parents);
}

/// Complete b-ary tree of the given depth, ids in breadth-first order.
inline Tree build_bary(std::size_t branching, std::size_t depth) {
  return build_bary_capped(branching, depth, depth);
}

/// One entry of a tree document: an id and the id of its parent (absent for
/// the root).
struct TreeDocumentEntry {
  std::string id;
  std::optional<std::string> parent;
};

/// Builds a tree from a document. The root receives index 0 and the
/// remaining vertices keep document order. Vertices above the frontier with
/// no children are accepted and listed in `terminal_violations()`.
inline Tree load_tree(const std::vector<TreeDocumentEntry>& entries) {
  if (entries.empty()) throw ValidationError("vertices", "document lists no vertices");
  std::optional<std::size_t> root;
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string where = "vertices[" + std::to_string(i) + "]";
    if (!position.emplace(e.id, i).second) throw ValidationError(where, "duplicate id '" + e.id + "'");
    if (!e.parent) {
      if (root) throw ValidationError(where, "multiple roots ('" + entries[*root].id + "' and '" + e.id + "')");
      root = i;
    }
  }
  if (!root) throw ValidationError("vertices", "no root (every vertex has a parent, so the parent links form a cycle)");

  std::vector<std::uint32_t> dense(entries.size());
  std::vector<std::string> labels;
  labels.reserve(entries.size());
  dense[*root] = 0;
  labels.push_back(entries[*root].id);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == *root) continue;
    dense[i] = static_cast<std::uint32_t>(labels.size());
    labels.push_back(entries[i].id);
  }

  std::vector<std::optional<std::uint32_t>> parents(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!e.parent) continue;
    const std::string where = "vertices[" + std::to_string(i) + "]";
    if (*e.parent == e.id) throw ValidationError(where, "cycle: vertex '" + e.id + "' is its own parent");
    auto it = position.find(*e.parent);
    if (it == position.end()) throw ValidationError(where, "parent '" + *e.parent + "' is not a listed vertex");
    parents[dense[i]] = dense[it->second];
  }
  return Tree::from_parents(parents, std::move(labels));
}

/// Parent-table view of a tree, suitable for serialization.
inline std::vector<TreeDocumentEntry> tree_document(const Tree& t) {
  std::vector<TreeDocumentEntry> out;
  out.reserve(t.size());
  for (std::uint32_t i = 0; i < t.size(); ++i) {
    const VertexId v{i};
    auto p = t.parent(v);
    out.push_back({t.label(v), p ? std::optional<std::string>(t.label(*p)) : std::nullopt});
  }
  return out;
}

/// Sub-tree of all vertices with depth <= `depth`, keeping relative order,
/// together with the index maps in both directions.
struct Truncation {
  Tree tree;
  std::vector<std::optional<VertexId>> to_new;
  std::vector<VertexId> to_old;
};

inline Truncation truncate(const Tree& t, std::size_t depth) {
  std::vector<std::optional<VertexId>> to_new(t.size());
  std::vector<VertexId> to_old;
  for (std::uint32_t i = 0; i < t.size(); ++i) {
    if (t.depth(VertexId{i}) <= depth) {
      to_new[i] = VertexId{static_cast<std::uint32_t>(to_old.size())};
      to_old.push_back(VertexId{i});
    }
  }
  std::vector<std::optional<std::uint32_t>> parents(to_old.size());
  std::vector<std::string> labels;
  if (t.has_labels()) labels.reserve(to_old.size());
  for (std::size_t j = 0; j < to_old.size(); ++j) {
    if (auto p = t.parent(to_old[j])) parents[j] = to_new[p->index]->index;
    if (t.has_labels()) labels.push_back(t.label(to_old[j]));
  }
  return {Tree::from_parents(parents, std::move(labels)), std::move(to_new), std::move(to_old)};
}

} // namespace spectree
